"""Fixture curves and functions shipped with the package."""
from importlib import resources

from .io import read_curve, read_function

OPEN = ("plus_x", "minus_x", "plus_y", "arc", "s_curve", "zigzag", "spiral", "hook")
CLOSED = ("circle", "ellipse", "square", "hand1", "hand2", "horse1", "horse2")
FUNCTIONS = ("f_monotone", "f_warped", "f_decreasing", "f_triangle", "f_wave")


def path(name: str):
    return resources.files("elastica") / "data" / f"{name}.csv"


def load(name: str):
    if name in FUNCTIONS:
        return read_function(path(name))
    if name in OPEN or name in CLOSED:
        return read_curve(path(name))
    raise KeyError(f"unknown fixture {name!r}")
