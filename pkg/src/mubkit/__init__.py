"""Mutually unbiased bases toolkit.

Construction of complete families in prime dimension from a closed form,
residual-certificate verification through flattened projectors, state
recovery via a small Hermitian eigensolver, quadratic exponential sum
checks, and a seeded numerical search for families in arbitrary dimension.
"""

from .algebra import (
    DEFAULT_TOL,
    MubFamily,
    canonical_phase,
    flatten,
    matrix_unit,
    projector_from_state,
    trace_product,
    unbiased_gram_target,
    unflatten,
    w_inner,
)
from .construct import build_family, computational_coefficient, is_prime, w_coefficient
from .gauss import GaussSumParams, check_factoring, gauss_sum, mub_gauss_params
from .io import FamilyDocument, load_family, save_family
from .reconstruct import (
    EigenDecomposition,
    eigen_hermitian,
    reconstruct_all,
    state_from_projector,
)
from .search import (
    SearchConfig,
    SearchResult,
    SearchState,
    gradient,
    objective,
    polish,
    run_search,
)
from .verify import VerificationReport, pairwise_angle, verify_family, verify_states

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "EigenDecomposition",
    "FamilyDocument",
    "GaussSumParams",
    "MubFamily",
    "SearchConfig",
    "SearchResult",
    "SearchState",
    "VerificationReport",
    "build_family",
    "canonical_phase",
    "check_factoring",
    "computational_coefficient",
    "eigen_hermitian",
    "flatten",
    "gauss_sum",
    "gradient",
    "is_prime",
    "load_family",
    "matrix_unit",
    "mub_gauss_params",
    "objective",
    "pairwise_angle",
    "polish",
    "projector_from_state",
    "reconstruct_all",
    "run_search",
    "save_family",
    "state_from_projector",
    "trace_product",
    "unbiased_gram_target",
    "unflatten",
    "verify_family",
    "verify_states",
    "w_coefficient",
    "w_inner",
]
