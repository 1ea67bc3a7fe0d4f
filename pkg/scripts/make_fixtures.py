"""Regenerate the fixture CSVs shipped in src/elastica/data."""
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "elastica" / "data"


def star(bumps, n=400, base=1.0, width=0.09):
    th = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    r = np.full_like(th, base)
    for angle, length in bumps:
        gap = np.angle(np.exp(1j * (th - angle)))
        r += length * np.exp(-(gap / width) ** 2)
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def write(name, pts, closed=False):
    header = "# closed" if closed else ""
    arr = np.asarray(pts, dtype=float)
    arr = arr[:, None] if arr.ndim == 1 else arr
    np.savetxt(OUT / f"{name}.csv", arr, delimiter=",", fmt="%.12g", header=header, comments="")
    if not closed:
        text = (OUT / f"{name}.csv").read_text().lstrip("\n")
        (OUT / f"{name}.csv").write_text(text)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write("plus_x", [[0.0, 0.0], [1.0, 0.0]])
    write("minus_x", [[0.0, 0.0], [-1.0, 0.0]])
    write("plus_y", [[0.0, 0.0], [0.0, 1.0]])
    t = np.linspace(0.0, np.pi / 2, 1000)
    write("arc", np.column_stack([np.cos(t), np.sin(t)]))
    t = np.linspace(0.0, 1.0, 400)
    write("s_curve", np.column_stack([t, 0.25 * np.sin(2 * np.pi * t)]))
    write("zigzag", [[0, 0], [1, 1], [2, 0], [3, 1], [4, 0]])
    t = np.linspace(0.0, 3 * np.pi, 600)
    write("spiral", np.column_stack([(1 + t) * np.cos(t), (1 + t) * np.sin(t)]))
    write("hook", np.vstack([np.column_stack([np.zeros(50), np.linspace(0, 2, 50)]),
                             np.column_stack([0.5 - 0.5 * np.cos(np.linspace(0, np.pi, 100)),
                                              2 + 0.5 * np.sin(np.linspace(0, np.pi, 100))])]))

    th = np.linspace(0.0, 2 * np.pi, 400, endpoint=False)
    write("circle", np.column_stack([np.cos(th), np.sin(th)]), closed=True)
    write("ellipse", np.column_stack([2 * np.cos(th), np.sin(th)]), closed=True)
    write("square", [[0, 0], [1, 0], [1, 1], [0, 1]], closed=True)
    fingers = [(-0.35, 0.9), (0.6, 1.4), (1.05, 1.6), (1.5, 1.5), (1.95, 1.2)]
    write("hand1", star(fingers), closed=True)
    write("hand2", star(fingers[:2] + fingers[3:]), closed=True)
    horse1 = [[0, 0], [0.4, 0], [0.5, 1.2], [0.8, 1.2], [0.9, 0], [1.3, 0], [1.35, 1.3],
              [2.6, 1.3], [2.7, 0], [3.1, 0], [3.05, 1.25], [3.3, 1.2], [3.45, 0], [3.85, 0],
              [3.7, 1.6], [3.9, 2.0], [4.5, 2.5], [4.9, 2.3], [4.3, 2.9], [3.9, 3.2], [3.4, 2.4],
              [1.3, 2.3], [0.5, 2.4], [-0.4, 1.6], [0.1, 1.7], [0.3, 1.4]]
    write("horse1", horse1, closed=True)
    horse2 = [[0, 0], [0.4, 0.1], [0.7, 1.1], [1.0, 1.15], [1.2, 0.2], [1.6, 0.25], [1.45, 1.3],
              [2.5, 1.3], [2.2, 0.1], [2.6, 0.0], [3.0, 1.2], [3.25, 1.15], [3.7, 0.2], [4.1, 0.3],
              [3.75, 1.6], [4.0, 2.1], [4.8, 2.2], [5.0, 1.9], [4.6, 2.8], [4.0, 3.1], [3.45, 2.45],
              [1.3, 2.35], [0.4, 2.5], [-0.5, 1.2], [0.0, 1.5], [0.25, 1.3]]
    write("horse2", horse2, closed=True)

    u = np.linspace(0.0, 1.0, 401)
    write("f_monotone", u ** 2 + u)
    write("f_warped", np.sqrt(u) + u ** 0.25)
    write("f_decreasing", 1.0 - u ** 3)
    write("f_triangle", np.where(u <= 0.5, u, 1.0 - u))
    write("f_wave", np.sin(3 * np.pi * u))


if __name__ == "__main__":
    main()
