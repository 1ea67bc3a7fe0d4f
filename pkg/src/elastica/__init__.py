"""Elastic metamorphosis distances and geodesics between curves."""
from .closed import (
    Frame2,
    closed_grassmann,
    closing_projection,
    distance_closed,
    frame_from,
    grassmann_distance,
    principal_angles,
)
from .curves import (
    AngleFunction,
    Curve,
    SampledFunction,
    TangentFunction,
    angle_lift,
    resample_arclength,
    sign_representation,
)
from .estimator import ElasticDistance, pairwise_elastic_distances
from .exceptions import *  # noqa: F401,F403
from .geodesic import (
    GeodesicPath,
    SphereFunction,
    great_circle,
    pointwise_interpolant,
    reconstruct_path,
    sphere_endpoints,
)
from .kernel import (
    CostField,
    Diffeo,
    MatchResult,
    cost_field,
    distance_1d,
    distance_open,
    distance_rotation_invariant,
    dp_match,
    energy,
)

__version__ = "0.1.0"
