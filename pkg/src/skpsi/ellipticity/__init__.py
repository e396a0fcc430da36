from .parametrix import (
    Parametrix,
    SmoothingInverse,
    invert_one_plus_smoothing,
    neumann_parametrix,
    parametrix,
)
from .refined import check_ellipticity, check_refined
from .report import (
    EllipticityReport,
    ParametrixResult,
    PrincipalTriple,
    Sigma3Certificate,
    principal_triple,
    sigma3_certificate,
    smallest_singular_values,
)
from .rough import check_rough, excised_inverse, limit_matrix
from .search import refine_minimum

__all__ = [
    "Parametrix",
    "SmoothingInverse",
    "invert_one_plus_smoothing",
    "neumann_parametrix",
    "parametrix",
    "check_ellipticity",
    "check_refined",
    "check_rough",
    "excised_inverse",
    "limit_matrix",
    "refine_minimum",
    "EllipticityReport",
    "ParametrixResult",
    "PrincipalTriple",
    "Sigma3Certificate",
    "principal_triple",
    "sigma3_certificate",
    "smallest_singular_values",
]
