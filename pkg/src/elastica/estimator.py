"""Scikit-learn compatible front end.

``ElasticDistance`` stores reference shapes at ``fit`` time and maps each
input shape to its vector of elastic distances to the references, so it can
feed distance-based models or pipelines (e.g. a kernel built from the output).
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .closed import distance_closed
from .curves import resample_arclength, sign_representation
from .kernel import _rotation_invariant, match_tangents
from .validation import check_curves, check_functions, check_params


class ElasticDistance(TransformerMixin, BaseEstimator):
    """Elastic metamorphosis distances to a set of reference curves.

    Parameters
    ----------
    sigma : float, default=1.0
        Balance between reparametrization and tangent rotation; needs ``2 sigma >= 1``.
    n_grid : int, default=256
        Arc-length grid size.
    k_max : int, default=4
        Largest step component of the matching lattice.
    rotation : bool, default=False
        Minimize over rotations of the input curve.
    offset : bool, default=False
        Treat curves as closed and minimize over the starting point.
    one_dim : bool, default=False
        Inputs are 1-d sampled functions compared modulo reparametrization.
    """

    def __init__(self, sigma=1.0, n_grid=256, k_max=4, rotation=False, offset=False, one_dim=False):
        self.sigma = sigma
        self.n_grid = n_grid
        self.k_max = k_max
        self.rotation = rotation
        self.offset = offset
        self.one_dim = one_dim

    def _tangents(self, X):
        if self.one_dim:
            return [sign_representation(f, self.n_grid) for f in check_functions(X)]
        closed = True if self.offset else None
        out = []
        for c in check_curves(X, closed=closed):
            out.append(c if not hasattr(c, "points") else resample_arclength(c, self.n_grid))
        return out

    def fit(self, X, y=None):
        check_params(self.sigma, self.n_grid, self.k_max)
        self.references_ = self._tangents(X)
        self.n_references_ = len(self.references_)
        return self

    def _distance(self, a, b) -> float:
        if self.offset and not self.one_dim:
            return distance_closed(a, b, self.sigma, self.n_grid, self.k_max, rotation=self.rotation).distance
        if self.rotation and not self.one_dim:
            return _rotation_invariant(a, b, float(self.sigma), self.k_max).distance
        return match_tangents(a, b, float(self.sigma), self.k_max).distance

    def transform(self, X):
        check_is_fitted(self, "references_")
        tangents = self._tangents(X)
        out = np.empty((len(tangents), self.n_references_))
        for i, a in enumerate(tangents):
            for j, b in enumerate(self.references_):
                out[i, j] = self._distance(a, b)
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "references_")
        return np.array([f"elasticdistance{j}" for j in range(self.n_references_)], dtype=object)


def pairwise_elastic_distances(X, Y=None, **params) -> np.ndarray:
    """Distance matrix between two collections of curves (``Y`` defaults to ``X``)."""
    est = ElasticDistance(**params).fit(X if Y is None else Y)
    return est.transform(X)
