"""Input validation shared by the estimator API and the CLI."""
from __future__ import annotations

import numbers

import numpy as np

from .curves import Curve, SampledFunction, TangentFunction
from .exceptions import BadGrid, BadSigma
from .geodesic import LIFT_MODES
from .kernel import check_sigma


def check_grid(n, minimum: int = 8) -> int:
    if not isinstance(n, numbers.Integral) or n < minimum:
        raise BadGrid(f"grid size must be an integer >= {minimum}, got {n!r}")
    return int(n)


def check_params(sigma=1.0, n=256, k_max=4, time_steps=16, lift_mode="measurable") -> dict:
    """Validate the numerical configuration; returns the normalized values."""
    if not isinstance(sigma, numbers.Real):
        raise BadSigma(f"sigma must be a real number, got {sigma!r}")
    sigma = check_sigma(sigma)
    n = check_grid(n)
    if not isinstance(k_max, numbers.Integral) or k_max < 1:
        raise BadGrid(f"k_max must be an integer >= 1, got {k_max!r}")
    if not isinstance(time_steps, numbers.Integral) or time_steps < 2:
        raise BadGrid(f"time_steps must be an integer >= 2, got {time_steps!r}")
    if lift_mode not in LIFT_MODES:
        raise ValueError(f"lift_mode must be one of {LIFT_MODES}, got {lift_mode!r}")
    return {"sigma": sigma, "n": n, "k_max": int(k_max), "time_steps": int(time_steps), "lift_mode": lift_mode}


def check_curve(curve, closed=None) -> Curve:
    """Coerce a point array (or Curve) to a Curve, optionally forcing ``closed``."""
    if isinstance(curve, Curve):
        return curve if closed is None or closed == curve.closed else Curve(curve.points, closed=closed)
    return Curve(np.asarray(curve, dtype=float), closed=bool(closed))


def check_curves(X, closed=None) -> list:
    if isinstance(X, (Curve, TangentFunction)):
        raise TypeError("expected a sequence of curves, got a single curve")
    if isinstance(X, np.ndarray) and X.ndim == 2:
        raise TypeError("expected a sequence of curves; wrap a single (n_points, d) array in a list")
    out = [c if isinstance(c, TangentFunction) else check_curve(c, closed) for c in X]
    if not out:
        raise ValueError("need at least one curve")
    return out


def check_functions(X) -> list:
    out = [f if isinstance(f, SampledFunction) else SampledFunction(np.asarray(f, dtype=float)) for f in X]
    if not out:
        raise ValueError("need at least one function")
    return out
