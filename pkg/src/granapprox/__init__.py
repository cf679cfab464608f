"""Granular approximations of fuzzy sets over fuzzy T-preorder relations.

The package repairs inconsistent membership data: given a T-preorder relation
between instances and observed degrees, it computes the granularly
representable fuzzy set minimizing a quantile or squared loss, generalizing
rough lower and upper approximations to every quantile level in between.
"""

from ._validation import DEFAULT_TOL
from .approx import (
    GranularApproximation,
    complement_solve,
    granular_approx_mse,
    granular_approx_quantile,
    monotone_approximation_crisp,
    quantile_band,
    quantile_sweep,
)
from .connectives import Bijection, ResidualTriplet
from .errors import (
    GranapproxError,
    IterationLimitError,
    NegativeCycleError,
    ParseError,
    RelationError,
    SolverError,
    ValidationError,
)
from .estimator import GranularApproximator, make_triplet
from .relation import (
    inverse,
    is_t_transitive,
    phi_image,
    require_t_preorder,
    transitivity_violations,
    triangular_similarity,
)
from .rough import (
    alpha_cut,
    granule,
    is_granularly_representable,
    lower_approximation,
    representability_violations,
    upper_approximation,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "Bijection",
    "GranapproxError",
    "GranularApproximation",
    "GranularApproximator",
    "IterationLimitError",
    "NegativeCycleError",
    "ParseError",
    "RelationError",
    "ResidualTriplet",
    "SolverError",
    "ValidationError",
    "alpha_cut",
    "complement_solve",
    "granular_approx_mse",
    "granular_approx_quantile",
    "granule",
    "inverse",
    "is_granularly_representable",
    "is_t_transitive",
    "lower_approximation",
    "make_triplet",
    "monotone_approximation_crisp",
    "phi_image",
    "quantile_band",
    "quantile_sweep",
    "representability_violations",
    "require_t_preorder",
    "transitivity_violations",
    "triangular_similarity",
    "upper_approximation",
]
