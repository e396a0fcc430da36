"""Limit-families a^infinity and tests for membership in the calculus."""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from scipy.integrate import quad_vec

from skpsi.config import calculus_config as cc
from skpsi.exceptions import NoPrincipalData, NotInCalculus
from skpsi.symbols.base import (
    Adjoint,
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
    zero,
)
from skpsi.symbols.excision import excision
from skpsi.utils.fitting import fit_loglog

logger = logging.getLogger(__name__)

__all__ = [
    "limit_family",
    "limit_convergence",
    "membership_by_derivative_decay",
    "MembershipVerdict",
]


def _monomials(node: SymbolExpr, coef: complex = 1.0, N: Optional[int] = None):
    """Expand sums and products into (coefficient, factors, N) monomials."""
    if isinstance(node, Sum):
        for c, child in zip(node.coefficients, node.children):
            if c != 0:
                yield from _monomials(child, coef * c, N)
    elif isinstance(node, LeibnizProduct):
        for ca, fa, na in _monomials(node.left, 1.0, node.N):
            for cb, fb, nb in _monomials(node.right, 1.0, node.N):
                yield coef * ca * cb, fa + fb, max(na, nb)
    else:
        yield coef, [node], cc.leibniz_order if N is None else N


def _pole_value(factor: SymbolExpr) -> SymbolExpr:
    """The principal symbol of a classical factor at (xi, tau) = (0, 1)."""
    try:
        principal = factor.require_principal()
    except NoPrincipalData as err:
        raise NotInCalculus(
            f"Classical factor {factor!r} has no principal symbol."
        ) from err

    def evaluator(points):
        pole = EvaluationPoints(
            points.x, np.zeros_like(points.xi), np.ones_like(points.tau),
            points.theta,
        )
        return principal.evaluator(pole)

    def derivative(points, alpha, beta):
        if alpha > 0:
            return points.zeros(factor.shape)
        return None

    return FixedSymbol(
        evaluator,
        0.0,
        factor.shape,
        principal=HomogComponent(0.0, evaluator),
        derivative=derivative,
        x_dependent=factor.x_dependent,
        name=f"pole[{factor.name or factor.kind}]",
    )


def _taylor_limit(node: TaylorHomogeneous) -> SymbolExpr:
    leading = node.taylor.coefficients[0]

    def evaluator(points):
        phi = np.where(points.xi >= 0, 1.0, -1.0)
        chi = excision(points.xi, node.radius)
        values = points.fill(leading(points.x, phi, points.theta), node.shape)
        return chi[..., None, None] * values

    def leading_field(points):
        phi = np.where(points.xi >= 0, 1.0, -1.0)
        return points.fill(leading(points.x, phi, points.theta), node.shape)

    principal = HomogComponent(0.0, leading_field)
    return FixedSymbol(
        evaluator,
        0.0,
        node.shape,
        principal=principal,
        x_dependent=node.x_dependent,
        name="taylor-limit",
    )


def _own_limit(factor: SymbolExpr) -> Optional[SymbolExpr]:
    """Limit of a non-classical atom; ``None`` encodes a vanishing limit."""
    if isinstance(factor, SmoothingSymbol):
        if factor.vanishing_at_infinity:
            return None
        raise NotInCalculus("Smoothing family does not vanish as tau grows.")
    if not factor.tau_dependent:
        return factor
    if isinstance(factor, TaylorHomogeneous):
        return _taylor_limit(factor)
    if isinstance(factor, RawSymbol):
        raise NotInCalculus(
            f"{factor!r} has no structural limit; "
            "use the derivative-decay test."
        )
    if isinstance(factor, Adjoint):
        inner = limit_family(factor.child)
        return None if inner.is_zero else Adjoint(inner.symbol, factor.N)
    if isinstance(factor, ExcisedInverse):
        inner = limit_family(factor.child)
        if inner.is_zero:
            raise NotInCalculus(f"{factor!r} inverts a vanishing limit-family.")
        return ExcisedInverse(inner.symbol, factor.excise, factor.radius)
    raise NotInCalculus(f"No limit rule for {factor!r}.")


def _monomial_limit(factors, N) -> Optional[SymbolExpr]:
    classical = [f for f in factors if f.classical]
    others = [f for f in factors if not f.classical]
    if not classical:
        for f in others:
            if f.order > 0 and not isinstance(f, SmoothingSymbol):
                raise NotInCalculus(
                    f"{f!r} has positive order {f.order:g} and no compensating "
                    "order reduction."
                )
    else:
        weight = sum(f.order for f in classical)
        if weight > 0:
            raise NotInCalculus(
                f"Classical factors of total order {weight:g} > 0 diverge."
            )
        if weight < 0:
            return None

    pieces = []
    for f in factors:
        if f.classical and isinstance(f, ExcisedInverse) and f.excise:
            # the excision in xi survives the limit
            piece = ExcisedInverse(_pole_value(f.child), True, f.radius)
        elif f.classical:
            piece = _pole_value(f)
        else:
            piece = _own_limit(f)
        if piece is None:
            return None
        pieces.append(piece)
    result = pieces[0]
    for piece in pieces[1:]:
        result = LeibnizProduct(result, piece, N)
    return result


def limit_family(a: SymbolExpr) -> LimitFamily:
    """Structural limit-family of ``a`` as tau tends to infinity.

    Sums and products are expanded into monomials. In every monomial the
    classical factors contribute their principal symbol at the point
    (xi, tau) = (0, 1) when their orders add up to zero and force a
    vanishing limit when the sum is negative; fixed factors contribute
    themselves.

    Raises
    ------
    NotInCalculus
        If some monomial has no structural limit, e.g. a bare fixed symbol
        of positive order.
    """
    if not a.tau_dependent:
        if a.order > 0:
            raise NotInCalculus(
                f"{a!r} has positive order and no compensating order reduction."
            )
        return LimitFamily(a, a.order + 1)

    terms, coefficients = [], []
    for coef, factors, N in _monomials(a):
        limit = _monomial_limit(factors, N)
        if limit is not None:
            terms.append(limit)
            coefficients.append(coef)
    if not terms:
        logger.debug("Vanishing limit-family for %r.", a)
        return LimitFamily(zero(a.shape), a.order + 1, is_zero=True)
    return LimitFamily(
        Sum(terms, coefficients, name=f"limit[{a.name or a.kind}]"),
        a.order + 1,
    )


def _spectral_norm(values: np.ndarray) -> np.ndarray:
    if values.shape[-2:] == (1, 1):
        return np.abs(values[..., 0, 0])
    return np.linalg.norm(values, ord=2, axis=(-2, -1))


def limit_convergence(a: SymbolExpr, strip, grid, limit=None) -> pd.DataFrame:
    """Weighted sup distance between a(tau) and its limit-family per tau.

    The distance is measured in the order ``mu + 1`` topology, i.e. the
    pointwise norm is weighted by <xi>^{-(mu + 1)}. The fitted log-log slope
    over the strip's tau samples is stored in ``DataFrame.attrs["slope"]``.
    """
    limit = limit or a.limit
    x = grid.x_samples[:, None, None]
    xi = grid.frequencies[None, :, None]
    theta = np.asarray(strip.theta_samples)[None, None, :]
    target = limit(x, xi, theta)
    weight = (1.0 + xi**2) ** (-(a.order + 1) / 2)
    rows = []
    for tau in strip.tau_samples:
        gap = _spectral_norm(a.evaluate(x, xi, tau, theta) - target) * weight
        rows.append({"tau": float(tau), "distance": float(np.max(gap))})
    table = pd.DataFrame(rows)
    live = table[(table.tau > 0) & (table.distance > 0)]
    table.attrs["slope"] = (
        fit_loglog(live.tau, live.distance)[0] if len(live) >= 2 else np.nan
    )
    return table


@dataclass
class MembershipVerdict:
    passed: bool
    bound: float
    delta: float
    taus: np.ndarray
    bounds: np.ndarray
    limit: Optional[LimitFamily] = None
    limit_error: float = np.nan
    limit_values: Optional[np.ndarray] = field(default=None, repr=False)


def _tau_derivative(a, x, xi, tau, theta):
    h = cc.fd_step * max(1.0, tau)
    upper = a.evaluate(x, xi, tau + h, theta)
    lower = a.evaluate(x, xi, tau - h, theta)
    return (upper - lower) / (2 * h)


def _quadrature_limit(a, x, xi, theta, tau_max, decay):
    """a(1) + int_1^inf d_tau a, integrated in log tau with a power-law tail."""

    def integrand(u):
        tau = np.exp(u)
        return tau * _tau_derivative(a, x, xi, tau, theta)

    body, err = quad_vec(integrand, 0.0, np.log(tau_max), epsabs=1e-10)
    tail = np.zeros_like(body)
    if decay > 1:
        tail = tau_max * _tau_derivative(a, x, xi, tau_max, theta) / (decay - 1)
    value = a.evaluate(x, xi, 1.0, theta) + body + tail
    return value, float(err) + 0.1 * float(np.max(np.abs(tail), initial=0.0))


def membership_by_derivative_decay(
    a: SymbolExpr, delta: float, strip, grid
) -> MembershipVerdict:
    """Sufficient test for membership: (1 + tau)^{1 + delta} d_tau a bounded.

    The weighted derivative is sampled on the strip's tau values; the test
    passes when its largest value over the upper half of the tau grid does
    not exceed twice the largest value over the lower half. On a pass, the
    candidate limit a(1) + int_1^inf d_tau a is returned.
    """
    taus = np.asarray([t for t in strip.tau_samples if t >= 1.0], dtype=float)
    if len(taus) < 2:
        taus = np.asarray([1.0, 10.0])
    x = grid.x_samples[:, None, None]
    xi = grid.frequencies[None, :, None]
    theta = np.asarray(strip.theta_samples)[None, None, :]
    weight = (1.0 + xi**2) ** (-(a.order + 1) / 2)

    sizes = np.array(
        [
            np.max(_spectral_norm(_tau_derivative(a, x, xi, t, theta)) * weight)
            for t in taus
        ]
    )
    bounds = (1.0 + taus) ** (1.0 + delta) * sizes
    half = len(taus) // 2
    lower = np.max(bounds[: max(half, 1)])
    upper = np.max(bounds[half:])
    passed = bool(upper <= 2.0 * lower + cc.noise_floor)
    verdict = MembershipVerdict(
        passed, float(np.max(bounds)), float(delta), taus, bounds
    )
    logger.debug("Derivative-decay bounds %s -> passed=%s", bounds, passed)
    if not passed:
        return verdict

    decay = 0.0
    if sizes[-1] > 0 and sizes[-2] > 0:
        decay = -np.log(sizes[-1] / sizes[-2]) / np.log(taus[-1] / taus[-2])
    tau_max = float(taus[-1])
    values, error = _quadrature_limit(a, x, xi, theta, tau_max, decay)

    def evaluator(points):
        value, _ = _quadrature_limit(
            a, points.x, points.xi, points.theta, tau_max, decay
        )
        return value

    symbol = RawSymbol(
        evaluator,
        a.order,
        a.shape,
        x_dependent=a.x_dependent,
        tau_dependent=False,
        name="quadrature-limit",
    )
    verdict.limit = LimitFamily(symbol, a.order + 1)
    verdict.limit_error = error
    verdict.limit_values = values
    return verdict
