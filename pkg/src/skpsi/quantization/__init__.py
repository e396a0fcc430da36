from .export import export_matrix, load_matrix
from .operator import (
    ConditionReport,
    TruncatedOperator,
    interior_gap,
    oracle_compose,
    oracle_invert,
    quantize,
    sobolev_opnorm,
)
from .smoothing import SmoothingKernel, encode_smoothing

__all__ = [
    "ConditionReport",
    "TruncatedOperator",
    "interior_gap",
    "oracle_compose",
    "oracle_invert",
    "quantize",
    "sobolev_opnorm",
    "SmoothingKernel",
    "encode_smoothing",
    "export_matrix",
    "load_matrix",
]
