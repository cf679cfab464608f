"""Scikit-learn style wrapper around the granular approximation solvers.

``GranularApproximator`` is a label-repair transformer: ``fit(X, y)`` builds
(or accepts) a fuzzy T-preorder over the rows of ``X`` and replaces the
observed membership degrees ``y`` by their granular approximation.  The
repair is defined for the fitted sample only, like other embedding-style
transformers, so ``transform`` requires the same ``X`` it was fitted on.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import DEFAULT_TOL, membership_vector
from .approx import granular_approx_mse, granular_approx_quantile
from .connectives import Bijection, ResidualTriplet
from .errors import ValidationError
from .relation import triangular_similarity


def make_triplet(tnorm: str, phi=None) -> ResidualTriplet:
    """Build a residual triplet from plain parameters.

    ``phi`` may be ``None`` (identity), a :class:`Bijection`, or a
    ``("power", gamma)`` tuple.
    """
    if isinstance(phi, Bijection) or phi is None:
        bijection = phi or Bijection.identity()
    elif isinstance(phi, (tuple, list)) and len(phi) == 2 and phi[0] == "power":
        bijection = Bijection.power(float(phi[1]))
    elif phi == "identity":
        bijection = Bijection.identity()
    else:
        raise ValidationError(f"unsupported phi specification {phi!r}")
    if tnorm == "lukasiewicz":
        return ResidualTriplet.lukasiewicz(bijection)
    if tnorm == "product":
        return ResidualTriplet.product(bijection)
    raise ValidationError(f"unsupported t-norm {tnorm!r} (use lukasiewicz or product)")


class GranularApproximator(BaseEstimator, TransformerMixin):
    """Repair inconsistent membership degrees over a fuzzy T-preorder.

    Parameters
    ----------
    tnorm : {"lukasiewicz", "product"}
        Connective family defining the granularity constraints.
    phi : None, Bijection or ("power", gamma)
        Order isomorphism of the unit interval for the chosen family.
    loss : {"quantile", "squared"}
        Loss against the observed degrees.
    p : float
        Probability parameter of the quantile loss; ignored for "squared".
    relation : {"triangular", "precomputed"}
        With "triangular", X holds attribute columns and the relation is the
        triangular similarity; with "precomputed", X is the relation matrix.
    ranges : sequence or None
        Attribute ranges for the triangular similarity; data ranges when None.
    tol : float
        Comparison tolerance for degrees and relation properties.

    Attributes
    ----------
    memberships_ : ndarray
        Repaired membership degrees for the fitted rows.
    relation_ : ndarray
        The validated relation used by the solver.
    result_ : GranularApproximation
        Full solver output (objective, residuals, diagnostics).
    """

    def __init__(self, *, tnorm="lukasiewicz", phi=None, loss="quantile", p=0.5,
                 relation="triangular", ranges=None, tol=DEFAULT_TOL):
        self.tnorm = tnorm
        self.phi = phi
        self.loss = loss
        self.p = p
        self.relation = relation
        self.ranges = ranges
        self.tol = tol

    def fit(self, X, y):
        X = check_array(X, dtype=float)
        y = membership_vector(np.asarray(y, dtype=float), X.shape[0], tol=self.tol,
                              name="y")
        triplet = make_triplet(self.tnorm, self.phi)
        if self.relation == "triangular":
            rel = triangular_similarity(X, self.ranges, tol=self.tol)
        elif self.relation == "precomputed":
            if X.shape[0] != X.shape[1]:
                raise ValidationError("precomputed relation must be square")
            rel = X
        else:
            raise ValidationError(f"unknown relation mode {self.relation!r}")
        if self.loss == "quantile":
            result = granular_approx_quantile(rel, y, triplet, self.p, tol=self.tol)
        elif self.loss == "squared":
            result = granular_approx_mse(rel, y, triplet, tol=self.tol)
        else:
            raise ValidationError(f"unknown loss {self.loss!r} (use quantile or squared)")
        self.n_features_in_ = X.shape[1]
        self._fit_X = X
        self.relation_ = rel
        self.result_ = result
        self.memberships_ = result.memberships
        self.phi_values_ = result.phi_values
        self.objective_ = result.objective
        self.feasibility_residual_ = result.feasibility_residual
        return self

    def transform(self, X):
        check_is_fitted(self, "memberships_")
        X = check_array(X, dtype=float)
        if X.shape != self._fit_X.shape or not np.allclose(X, self._fit_X):
            raise ValidationError(
                "the repair is defined for the fitted sample; transform expects "
                "the same X that was passed to fit")
        return self.memberships_.copy()

    def predict(self, X):
        return self.transform(X)
