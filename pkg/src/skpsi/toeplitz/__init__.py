from .compression import (
    ToeplitzOperator,
    ToeplitzParametrixResult,
    extended_symbol,
    orthonormality,
    range_basis,
    toeplitz_ellipticity,
    toeplitz_parametrix,
)
from .projections import (
    OrderReductionPair,
    ProjectionSymbol,
    make_hardy_projection,
    make_identity_projection,
    make_rotated_projection,
    make_zero_projection,
    tilde_conjugate,
)
from .resolvent import (
    ResolventEstimator,
    ResolventRecord,
    remark_identity_check,
    resolvent_family,
    resolvent_pipeline,
    spectral_equivalence_check,
)

__all__ = [
    "ToeplitzOperator",
    "ToeplitzParametrixResult",
    "extended_symbol",
    "orthonormality",
    "range_basis",
    "toeplitz_ellipticity",
    "toeplitz_parametrix",
    "OrderReductionPair",
    "ProjectionSymbol",
    "make_hardy_projection",
    "make_identity_projection",
    "make_rotated_projection",
    "make_zero_projection",
    "tilde_conjugate",
    "ResolventEstimator",
    "ResolventRecord",
    "remark_identity_check",
    "resolvent_family",
    "resolvent_pipeline",
    "spectral_equivalence_check",
]
