"""Command-line interface: ``elastica {dist,geodesic,match,grassmann,close}``.

Exit codes: 0 success, 2 unreadable input, 3 invalid configuration or input
class, 4 degenerate geometry.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _dp
from .closed import closed_grassmann, closing_projection, distance_closed
from .curves import TangentFunction, resample_arclength, sign_representation
from .exceptions import DegenerateEndpoints, ElasticaError, NotClosed, ParseError
from .geodesic import MEASURABLE, reconstruct_path
from .io import dumps, read_curve, read_function, write_curve
from .kernel import cost_field, distance_open, distance_rotation_invariant, match_tangents
from .validation import check_params


@dataclass(frozen=True)
class Config:
    sigma: float = 1.0
    n: int = 256
    k_max: int = 4
    time_steps: int = 16
    lift_mode: str = MEASURABLE
    rotation: bool = False
    offset: bool = False
    one_dim: bool = False
    close_frames: bool = False

    def __post_init__(self):
        check_params(self.sigma, self.n, self.k_max, self.time_steps, self.lift_mode)


def _read_inputs(path_a, path_b, config: Config):
    for p in (path_a, path_b):
        if not Path(p).is_file():
            raise ParseError(f"{p}: no such file")
    if config.one_dim:
        return read_function(path_a), read_function(path_b)
    m0, m1 = read_curve(path_a), read_curve(path_b)
    if config.offset and not (m0.closed and m1.closed):
        raise NotClosed("--offset needs both curves flagged '# closed'")
    return m0, m1


def _match(m0, m1, config: Config):
    """Run the configured distance and return (result, a0 as matched, a1)."""
    if config.one_dim:
        a0, a1 = sign_representation(m0, config.n), sign_representation(m1, config.n)
        return match_tangents(a0, a1, config.sigma, config.k_max), a0, a1
    a0, a1 = resample_arclength(m0, config.n), resample_arclength(m1, config.n)
    if config.offset:
        res = distance_closed(a0, a1, config.sigma, config.n, config.k_max, rotation=config.rotation)
    elif config.rotation:
        res = distance_rotation_invariant(a0, a1, config.sigma, config.n, config.k_max)
    else:
        res = distance_open(a0, a1, config.sigma, config.n, config.k_max)
    if res.offset:
        a0 = a0.shifted(int(round(res.offset * config.n)))
    if res.rotation is not None:
        a0 = a0.rotated(res.rotation)
    return res, a0, a1


def cmd_dist(path_a, path_b, config: Config, out=None) -> dict:
    res, _, _ = _match(*_read_inputs(path_a, path_b, config), config)
    payload = res.to_dict()
    (out or sys.stdout).write(dumps(payload) + "\n")
    return payload


def _display_closed(points: np.ndarray) -> np.ndarray:
    n = len(points) - 1
    closed = closing_projection(TangentFunction.from_vectors(np.diff(points, axis=0) * n, closed=True))
    return closed.to_points(origin=points[0])[:-1]


def cmd_geodesic(path_a, path_b, out_dir, config: Config) -> dict:
    res, a0, a1 = _match(*_read_inputs(path_a, path_b, config), config)
    try:
        path = reconstruct_path(a0, a1, res.phi, config.sigma, config.time_steps, config.lift_mode)
    except DegenerateEndpoints as exc:
        raise DegenerateEndpoints(
            f"{exc} (the great circle needs omega / (2 sigma) != pi mod 2 pi somewhere)") from None
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    width = len(str(len(path.times) - 1))
    for k, pts in enumerate(path.curves):
        if config.close_frames:
            write_curve(out_dir / f"frame_{k:0{width}d}.csv", _display_closed(pts), closed=True)
        else:
            write_curve(out_dir / f"frame_{k:0{width}d}.csv", pts)
    payload = path.to_dict()
    payload["distance"] = res.distance
    (out_dir / "path.json").write_text(dumps(payload) + "\n")
    report = {"valid": not path.validity, "cells": [list(v) for v in path.validity],
              "lift_error": path.lift_error}
    (out_dir / "validity.json").write_text(dumps(report) + "\n")
    return payload


def cmd_match(path_a, path_b, out_dir, config: Config) -> dict:
    res, a0, a1 = _match(*_read_inputs(path_a, path_b, config), config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cost_field(a0, a1, config.sigma).to_csv(out_dir / "cost_field.csv")
    payload = {"distance": res.distance, "score": res.score, "sigma": res.sigma,
               "phi": res.phi.knots.tolist(), "offset": res.offset}
    (out_dir / "phi.json").write_text(dumps(payload) + "\n")
    return payload


def cmd_grassmann(path_a, path_b, config: Config, out=None) -> dict:
    m0, m1 = _read_inputs(path_a, path_b, config)
    if not (m0.closed and m1.closed):
        raise NotClosed("the Grassmann distance needs both curves flagged '# closed'")
    a0, a1 = resample_arclength(m0, config.n), resample_arclength(m1, config.n)
    offset = 0.0
    if config.offset:
        res = distance_closed(a0, a1, 1.0, config.n, config.k_max, rotation=False)
        offset = res.offset
        a0 = a0.shifted(int(round(offset * config.n)))
    else:
        res = match_tangents(a0, a1, 1.0, config.k_max)
    info = closed_grassmann(a0, a1, res.phi)
    payload = {"distance": info["distance"], "gram": info["gram"],
               "singular_values": info["singular_values"], "offset": offset}
    (out or sys.stdout).write(dumps(payload) + "\n")
    return payload


def cmd_close(path_a, config: Config, out_path=None, out=None) -> np.ndarray:
    if not Path(path_a).is_file():
        raise ParseError(f"{path_a}: no such file")
    m = read_curve(path_a)
    closed = closing_projection(resample_arclength(m, config.n))
    pts = closed.to_points(origin=m.points[0])[:-1]
    if out_path:
        write_curve(out_path, pts, closed=True)
    else:
        (out or sys.stdout).write("# closed\n" + "\n".join(",".join(format(v, ".17g") for v in row) for row in pts) + "\n")
    return pts


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sigma", type=float, default=1.0)
    common.add_argument("--grid", type=int, default=256, help="arc-length grid size n")
    common.add_argument("--kmax", type=int, default=4, help="largest lattice step component")
    common.add_argument("--time-steps", type=int, default=16)
    common.add_argument("--rotation", action="store_true", help="minimize over rotations")
    common.add_argument("--offset", action="store_true", help="closed curves: minimize over start point")
    common.add_argument("--one-dim", action="store_true", help="inputs are single-column functions")
    common.add_argument("--lift", choices=["measurable", "smooth"], default=MEASURABLE)
    common.add_argument("--close-frames", action="store_true", help="close geodesic frames for display")
    common.add_argument("--out", help="output directory (geodesic, match) or file (close)")

    parser = argparse.ArgumentParser(prog="elastica", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("dist", "geodesic", "match", "grassmann"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("curve_a")
        p.add_argument("curve_b")
    p = sub.add_parser("close", parents=[common])
    p.add_argument("curve_a")
    return parser


def main(argv=None) -> int:
    _dp.set_threads_from_env()
    args = build_parser().parse_args(argv)
    try:
        config = Config(sigma=args.sigma, n=args.grid, k_max=args.kmax, time_steps=args.time_steps,
                        lift_mode=args.lift, rotation=args.rotation, offset=args.offset,
                        one_dim=args.one_dim, close_frames=args.close_frames)
        if args.command == "dist":
            cmd_dist(args.curve_a, args.curve_b, config)
        elif args.command == "grassmann":
            cmd_grassmann(args.curve_a, args.curve_b, config)
        elif args.command == "close":
            cmd_close(args.curve_a, config, args.out)
        else:
            if not args.out:
                raise ParseError(f"{args.command} needs --out DIR")
            handler = cmd_geodesic if args.command == "geodesic" else cmd_match
            handler(args.curve_a, args.curve_b, args.out, config)
    except ElasticaError as exc:
        print(f"elastica: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"elastica: error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
