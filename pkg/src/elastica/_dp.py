"""Numba kernels for the monotone-path dynamic program.

The lattice has knots ``(i, j)``, ``0 <= i, j <= n``.  A step ``(p, q)`` joins
``(i, j)`` to ``(i + p, j + q)``; the segment crosses a fixed list of cells
(offsets ``di, dj`` relative to the start knot) and its value is
``sum_c coef[c] * field[i + di[c], j + dj[c]]``.
"""
import math
import os

import numba
import numpy as np

TIE_TOL = 1e-14

if "NUMBA_THREADING_LAYER" not in os.environ:
    # tbb builds shipped with some distros are too old and only emit warnings
    numba.config.THREADING_LAYER = "workqueue"


def set_threads_from_env():
    value = os.environ.get("ELASTICA_THREADS")
    if value:
        numba.set_num_threads(max(1, min(int(value), numba.config.NUMBA_NUM_THREADS)))


def step_geometry(steps, n):
    """Cell offsets and coefficients for every step in ``steps``.

    For a step (p, q) the segment is cut where it crosses vertical (u = k/p) or
    horizontal (u = l/q) grid lines.  A piece of parameter length du spans
    p*du/n in s and q*du/n in s-tilde, so it contributes sqrt(p*q)*du/n.
    """
    k = len(steps)
    width = max(p + q for p, q in steps)
    di = np.zeros((k, width), dtype=np.int64)
    dj = np.zeros((k, width), dtype=np.int64)
    coef = np.zeros((k, width))
    ncell = np.zeros(k, dtype=np.int64)
    for s, (p, q) in enumerate(steps):
        cuts = sorted({a / p for a in range(p + 1)} | {b / q for b in range(q + 1)})
        c = 0
        for u0, u1 in zip(cuts[:-1], cuts[1:]):
            if u1 - u0 <= 0:
                continue
            um = 0.5 * (u0 + u1)
            di[s, c] = int(math.floor(p * um))
            dj[s, c] = int(math.floor(q * um))
            coef[s, c] = math.sqrt(p * q) * (u1 - u0) / n
            c += 1
        ncell[s] = c
    return di, dj, coef, ncell


@numba.njit(cache=True)
def _fill(field, steps, di, dj, coef, ncell, value, back):
    n = field.shape[0]
    nsteps = steps.shape[0]
    # weight[s, i, j]: value of step s taken from knot (i, j)
    weight = np.zeros((nsteps, n + 1, n + 1))
    for s in range(nsteps):
        p = steps[s, 0]
        q = steps[s, 1]
        for i in range(n - p + 1):
            row = weight[s, i]
            for c in range(ncell[s]):
                cf = coef[s, c]
                src = field[i + di[s, c]]
                off = dj[s, c]
                for j in range(n - q + 1):
                    row[j] += cf * src[j + off]
    value[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            best = -np.inf
            arg = -1
            for s in range(nsteps):
                pi = i - steps[s, 0]
                pj = j - steps[s, 1]
                if pi < 0 or pj < 0:
                    continue
                cand = value[pi, pj] + weight[s, pi, pj]
                # steps arrive in preference order; later ones must win clearly
                if cand > best + TIE_TOL:
                    best = cand
                    arg = s
            value[i, j] = best
            back[i, j] = arg


def dp_table(field, steps, di, dj, coef, ncell):
    n = field.shape[0]
    value = np.full((n + 1, n + 1), -np.inf)
    back = np.full((n + 1, n + 1), -1, dtype=np.int64)
    _fill(np.ascontiguousarray(field, dtype=np.float64), steps, di, dj, coef, ncell, value, back)
    return value, back


@numba.njit(cache=True, parallel=True)
def _batch_scores(fields, steps, di, dj, coef, ncell, out):
    b = fields.shape[0]
    n = fields.shape[1]
    for k in numba.prange(b):
        value = np.full((n + 1, n + 1), -np.inf)
        back = np.full((n + 1, n + 1), -1, dtype=np.int64)
        _fill(fields[k], steps, di, dj, coef, ncell, value, back)
        out[k] = value[n, n]


def batch_scores(fields, steps, di, dj, coef, ncell):
    fields = np.ascontiguousarray(fields, dtype=np.float64)
    out = np.empty(fields.shape[0])
    _batch_scores(fields, steps, di, dj, coef, ncell, out)
    return out


def backtrack(back, steps):
    n = back.shape[0] - 1
    i = j = n
    nodes = [(n, n)]
    while (i, j) != (0, 0):
        s = back[i, j]
        if s < 0:
            raise RuntimeError("dynamic program left the end node unreachable")
        i -= steps[s, 0]
        j -= steps[s, 1]
        nodes.append((i, j))
    return np.array(nodes[::-1], dtype=np.int64)
