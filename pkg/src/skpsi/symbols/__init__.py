from skpsi.symbols.base import (
    Adjoint,
    AngularSymbol,
    ClassicalParam,
    EvaluationPoints,
    ExcisedInverse,
    FixedSymbol,
    HomogComponent,
    LeibnizProduct,
    LimitFamily,
    RawSymbol,
    SmoothingSymbol,
    Sum,
    SymbolExpr,
    TaylorHomogeneous,
    constant,
    identity,
    zero,
)
from skpsi.symbols.calculus import (
    adjoint_symbol,
    asymptotic_sum,
    leibniz_product,
)
from skpsi.symbols.catalog import get_symbol, list_symbols, symbol_metadata
from skpsi.symbols.excision import excision, hardy_step
from skpsi.symbols.limits import (
    MembershipVerdict,
    limit_convergence,
    limit_family,
    membership_by_derivative_decay,
)
from skpsi.symbols.taylor import (
    TaylorData,
    angular_symbol,
    homog_extend,
    invert_taylor,
    taylor_expand_northpole,
)

__all__ = [
    "Adjoint",
    "AngularSymbol",
    "ClassicalParam",
    "EvaluationPoints",
    "ExcisedInverse",
    "FixedSymbol",
    "HomogComponent",
    "LeibnizProduct",
    "LimitFamily",
    "RawSymbol",
    "SmoothingSymbol",
    "Sum",
    "SymbolExpr",
    "TaylorHomogeneous",
    "TaylorData",
    "MembershipVerdict",
    "constant",
    "identity",
    "zero",
    "adjoint_symbol",
    "asymptotic_sum",
    "leibniz_product",
    "get_symbol",
    "list_symbols",
    "symbol_metadata",
    "excision",
    "hardy_step",
    "limit_convergence",
    "limit_family",
    "membership_by_derivative_decay",
    "angular_symbol",
    "homog_extend",
    "invert_taylor",
    "taylor_expand_northpole",
]
