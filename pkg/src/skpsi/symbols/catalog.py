"""Generators with closed forms and the string-addressable symbol catalog."""

import logging
from math import factorial
from typing import Callable, Mapping

import numpy as np
from sklearn.utils import check_random_state

from skpsi.exceptions import CatalogMiss, NoPrincipalData
from skpsi.symbols.base import (
    ClassicalParam,
    FixedSymbol,
    HomogComponent,
    LeibnizProduct,
    RawSymbol,
    Sum,
    SymbolExpr,
    identity,
    zero,
)
from skpsi.symbols.excision import hardy_step
from skpsi.symbols.taylor import homog_extend, taylor_expand_northpole

logger = logging.getLogger(__name__)

__all__ = [
    "bracket_power",
    "linear_symbol",
    "parameter_monomial",
    "trig_polynomial",
    "random_trig_polynomial",
    "hardy_symbol",
    "rotated_projection",
    "get_symbol",
    "list_symbols",
    "symbol_metadata",
    "CATALOG",
]


def _falling(p: float, n: int) -> float:
    out = 1.0
    for i in range(n):
        out *= p - i
    return out


def bracket_derivative(xi, tau_sq, p: float, n: int) -> np.ndarray:
    """d_xi^n of (1 + xi^2 + tau_sq)^p in closed form.

    Examples
    --------
    >>> float(bracket_derivative(0.0, 0.0, 0.5, 2))
    1.0
    """
    xi = np.asarray(xi, dtype=float)
    u = 1.0 + xi**2 + tau_sq
    total = 0.0
    for j in range(n // 2 + 1):
        c = factorial(n) / (factorial(j) * factorial(n - 2 * j))
        total = total + (
            c * _falling(p, n - j) * u ** (p - n + j) * (2 * xi) ** (n - 2 * j)
        )
    return total


def _times_eye(value, n: int):
    if n == 1:
        return value
    return np.asarray(value)[..., None, None] * np.eye(n)


def bracket_power(m: float, parameter: bool = True, n: int = 1) -> SymbolExpr:
    """<xi, tau>^m when ``parameter`` is set, otherwise the fixed <xi>^m.

    With ``n > 1`` the scalar is multiplied by the n x n identity.
    """
    p = m / 2.0
    shape = (n, n)
    eye = np.eye(n)
    if parameter:

        def evaluator(points):
            return _times_eye((1.0 + points.xi**2 + points.tau**2) ** p, n)

        def derivative(points, alpha, beta):
            return _times_eye(
                bracket_derivative(points.xi, points.tau**2, p, alpha), n
            )

        def principal_field(points):
            return ((points.xi**2 + points.tau**2) ** p)[..., None, None] * eye

        principal = HomogComponent(m, principal_field)
        return ClassicalParam(
            evaluator,
            m,
            shape,
            components=[principal],
            derivative=derivative,
            name=f"<xi,tau>^{m:g}",
        )

    def fixed(points):
        return _times_eye((1.0 + points.xi**2) ** p, n)

    def fixed_derivative(points, alpha, beta):
        return _times_eye(bracket_derivative(points.xi, 0.0, p, alpha), n)

    principal = HomogComponent(
        m, lambda points: (np.abs(points.xi) ** m)[..., None, None] * eye
    )
    return FixedSymbol(
        fixed,
        m,
        shape,
        principal=principal,
        derivative=fixed_derivative,
        name=f"<xi>^{m:g}",
    )


def linear_symbol(c0: complex = 0.0, c1: complex = 0.0, c2: complex = 1.0):
    """c0 + c1 xi + c2 tau e^{i theta}, a classical symbol of order one."""

    def evaluator(points):
        return c0 + c1 * points.xi + c2 * points.tau * np.exp(1j * points.theta)

    def derivative(points, alpha, beta):
        if alpha == 0:
            return None
        if alpha == 1:
            return np.full(points.shape, c1, dtype=complex)
        return points.zeros((1, 1))

    principal = HomogComponent(
        1.0,
        lambda points: (
            c1 * points.xi + c2 * points.tau * np.exp(1j * points.theta)
        )[..., None, None],
    )
    return ClassicalParam(
        evaluator,
        1.0,
        components=[principal],
        derivative=derivative,
        name="linear",
    )


def parameter_monomial(mu: float = 1.0, n: int = 1) -> ClassicalParam:
    """tau^mu e^{i theta}, times the n x n identity."""
    eye = np.eye(n)

    def evaluator(points):
        return _times_eye(points.tau**mu * np.exp(1j * points.theta), n)

    def derivative(points, alpha, beta):
        return None if alpha == 0 else points.zeros((n, n))

    component = HomogComponent(
        mu,
        lambda points: (points.tau**mu * np.exp(1j * points.theta))[
            ..., None, None
        ]
        * eye,
    )
    return ClassicalParam(
        evaluator,
        mu,
        (n, n),
        components=[component],
        derivative=derivative,
        name=f"tau^{mu:g}e^itheta",
    )


def trig_polynomial(coefficients: Mapping[int, object], name=None):
    """The multiplication symbol f(x) = sum_n c_n e^{i n x}.

    ``coefficients`` maps frequencies to scalars or equally shaped matrices.
    """
    terms = {
        int(n): np.atleast_2d(np.asarray(c, dtype=complex))
        for n, c in coefficients.items()
    }
    shape = next(iter(terms.values())).shape

    def evaluator(points, beta=0):
        total = points.zeros(shape)
        for n, c in terms.items():
            phase = (1j * n) ** beta * np.exp(1j * n * points.x)
            total = total + phase[..., None, None] * c
        return total

    def derivative(points, alpha, beta):
        if alpha > 0:
            return points.zeros(shape)
        return evaluator(points, beta)

    return ClassicalParam(
        evaluator,
        0.0,
        shape,
        components=[HomogComponent(0.0, evaluator)],
        derivative=derivative,
        x_dependent=True,
        tau_dependent=False,
        name=name or "trig",
    )


def hardy_symbol() -> FixedSymbol:
    """The smooth step psi(xi); psi(k) is 1 for integers k >= 0, else 0."""

    def evaluator(points):
        return hardy_step(points.xi)

    def derivative(points, alpha, beta):
        return hardy_step(points.xi, alpha)

    principal = HomogComponent(
        0.0, lambda points: (points.xi > 0).astype(complex)[..., None, None]
    )
    return FixedSymbol(
        evaluator, 0.0, principal=principal, derivative=derivative, name="hardy"
    )


def random_trig_polynomial(
    random_state=None, bandwidth: int = 8, shape=(1, 1)
):
    """A trigonometric multiplier with random coefficients of size 2^-|n|.

    Examples
    --------
    >>> a = random_trig_polynomial(0, bandwidth=2)
    >>> a.x_dependent, a.order
    (True, 0.0)
    """
    rng = check_random_state(random_state)
    coefficients = {}
    for n in range(-bandwidth, bandwidth + 1):
        c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        coefficients[n] = 2.0 ** -abs(n) * c
    return trig_polynomial(coefficients, name="random-trig")


def rotated_projection() -> ClassicalParam:
    """u(x) u(x)* with u(x) = cos(x/2) e1 + sin(x/2) e2."""
    half = 0.5 * np.eye(2)
    up = np.array([[0.25, -0.25j], [-0.25j, -0.25]])
    down = np.array([[0.25, 0.25j], [0.25j, -0.25]])
    return trig_polynomial(
        {0: half, 1: up, -1: down}, name="rotated-projection"
    )


def _order_zero_profile(points):
    return 2.0 + points.xi / np.sqrt(1.0 + points.xi**2)


def _tau_profile(fn: Callable, name: str) -> RawSymbol:
    def evaluator(points):
        return fn(points.tau) * _order_zero_profile(points)

    return RawSymbol(evaluator, 0.0, name=name)


def _spread(value, *coords):
    return value * np.ones(np.broadcast_shapes(*(np.shape(c) for c in coords)))


def _taylor_rho(**_):
    data = taylor_expand_northpole(
        lambda x, phi, rho, theta: _spread(rho, x, phi, theta).astype(complex)
    )
    return homog_extend(data)


def _taylor_resolvent(**_):
    def evaluator(x, phi, rho, theta):
        return _spread(
            np.cos(rho) * np.exp(1j * theta) - np.sin(rho), x, phi
        )

    return homog_extend(taylor_expand_northpole(evaluator))


def _resolvent_reduced(eps: float = 0.0, **_):
    """<xi, tau>^-1 (tau e^{i theta} - <xi>), optionally plus
    eps e^{ix} <xi, tau>^-1."""
    reduction = bracket_power(-1.0)
    body = Sum(
        [parameter_monomial(1.0), bracket_power(1.0, parameter=False)],
        [1.0, -1.0],
    )
    a = LeibnizProduct(reduction, body, name="resolvent-reduced")
    if eps:
        shift = trig_polynomial({1: 1.0}, name="e^ix")
        a = Sum([a, LeibnizProduct(shift, reduction)], [1.0, eps], name=a.name)
    return a


def _transport(eps: float = 0.0, **_):
    a = linear_symbol(0.0, 1j, 1.0)
    if eps:
        a = Sum([a, trig_polynomial({1: 1.0})], [1.0, eps], name="transport")
    return a


def _bessel_perturbed(eps: float = 0.1, **_):
    return Sum(
        [bracket_power(1.0, parameter=False), trig_polynomial({1: 1.0})],
        [1.0, eps],
        name="bessel1-perturbed",
    )


CATALOG = {
    "identity": lambda shape=1, **_: identity(shape),
    "zero": lambda shape=1, **_: zero((shape, shape)),
    "bessel1": lambda **_: bracket_power(1.0, parameter=False),
    "bessel-1": lambda **_: bracket_power(-1.0, parameter=False),
    "bessel1-perturbed": _bessel_perturbed,
    "param-bessel1": lambda **_: bracket_power(1.0),
    "param-bessel-1": lambda **_: bracket_power(-1.0),
    "exp-ix": lambda **_: trig_polynomial({1: 1.0}, name="e^ix"),
    "hardy": lambda **_: hardy_symbol(),
    "rotated-projection": lambda **_: rotated_projection(),
    "resolvent-reduced": _resolvent_reduced,
    "limit-model": lambda **_: LeibnizProduct(
        parameter_monomial(1.0), bracket_power(-1.0), name="limit-model"
    ),
    "transport": _transport,
    "taylor-rho": _taylor_rho,
    "taylor-resolvent": _taylor_resolvent,
    "arctan-tau": lambda **_: _tau_profile(np.arctan, "arctan-tau"),
    "sin-log-tau": lambda **_: _tau_profile(
        lambda tau: np.sin(np.log1p(tau)), "sin-log-tau"
    ),
}


def list_symbols() -> list:
    return sorted(CATALOG)


def get_symbol(identifier: str, **params) -> SymbolExpr:
    """Build the catalog symbol ``identifier``.

    Raises
    ------
    CatalogMiss
        If the identifier is unknown.

    Examples
    --------
    >>> get_symbol("bessel1").order
    1.0
    """
    try:
        factory = CATALOG[identifier]
    except KeyError:
        raise CatalogMiss(
            f"Unknown catalog symbol {identifier!r}; "
            f"known: {', '.join(list_symbols())}."
        ) from None
    logger.debug("Building catalog symbol %s with %s", identifier, params)
    return factory(**params)


def symbol_metadata(
    a: SymbolExpr, xi=(-2.0, -1.0, 1.0, 2.0), tau=1.0, theta=0.0
):
    """Report-friendly description with a sampled principal fingerprint."""
    meta = {
        "name": a.name or a.kind,
        "kind": a.kind,
        "order": float(a.order),
        "shape": list(a.shape),
        "classical": a.classical,
        "x_dependent": a.x_dependent,
        "tau_dependent": a.tau_dependent,
    }
    try:
        values = a.require_principal()(0.0, np.asarray(xi), tau, theta)
        meta["principal_fingerprint"] = [
            [float(v.real), float(v.imag)] for v in values.reshape(-1)
        ]
    except NoPrincipalData:
        meta["principal_fingerprint"] = None
    return meta
