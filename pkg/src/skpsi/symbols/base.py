"""Structured symbols a(x, xi, tau, theta) on the circle.

A symbol is a tree whose leaves carry closed forms (or at least an
evaluator) and whose inner nodes are the operations of the calculus: sums,
truncated Leibniz products, adjoints and excised inverses. Principal data
(homogeneous principal symbol, angular symbol, limit-family) propagates
along the tree by rule.

All evaluators share one calling convention: they receive broadcastable
arrays ``x, xi, tau, theta`` and return an array of shape
``broadcast_shape + (N1, N0)``.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from math import comb, factorial
from typing import Callable, Optional, Sequence

import numpy as np

from skpsi.config import calculus_config as cc
from skpsi.exceptions import (
    DerivativeOrderTooHigh,
    NoPrincipalData,
    NonEvaluable,
    ShapeMismatch,
    SingularAtPoint,
    TruncationTooDeep,
)
from skpsi.symbols.excision import excision

logger = logging.getLogger(__name__)

__all__ = [
    "EvaluationPoints",
    "HomogComponent",
    "LimitFamily",
    "AngularSymbol",
    "SymbolExpr",
    "ClassicalParam",
    "FixedSymbol",
    "RawSymbol",
    "TaylorHomogeneous",
    "SmoothingSymbol",
    "Sum",
    "LeibnizProduct",
    "Adjoint",
    "ExcisedInverse",
    "constant",
    "identity",
    "zero",
]


class EvaluationPoints:
    """Broadcast sample points with a per-node derivative cache.

    The cache makes repeated derivative requests inside nested Leibniz
    expansions cost one evaluation per ``(node, alpha, beta)``.
    """

    def __init__(self, x, xi, tau, theta):
        arrays = [np.asarray(v, dtype=float) for v in (x, xi, tau, theta)]
        self.x, self.xi, self.tau, self.theta = np.broadcast_arrays(*arrays)
        self.shape = self.x.shape
        self._cache = {}

    def shifted(self, x=0.0, xi=0.0, tau=0.0) -> "EvaluationPoints":
        return EvaluationPoints(
            self.x + x, self.xi + xi, self.tau + tau, self.theta
        )

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(self.shape + tuple(shape), dtype=complex)

    def fill(self, value, shape) -> np.ndarray:
        """Broadcast a scalar field or a constant matrix to full shape."""
        value = np.asarray(value, dtype=complex)
        full = self.shape + tuple(shape)
        if value.shape == full:
            return value
        if value.shape == self.shape:
            return value[..., None, None] * np.ones(shape)
        return np.broadcast_to(value, full).copy()


def _as_points(points_or_x, xi=None, tau=None, theta=None):
    if isinstance(points_or_x, EvaluationPoints):
        return points_or_x
    return EvaluationPoints(points_or_x, xi, tau, theta)


def _conj_t(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


@dataclass(frozen=True, eq=False)
class HomogComponent:
    """A component homogeneous in the large of a given degree in (xi, tau)."""

    degree: float
    evaluator: Callable[..., np.ndarray]
    excision_radius: float = 1.0

    def __call__(self, x, xi, tau, theta) -> np.ndarray:
        return self.evaluator(_as_points(x, xi, tau, theta))

    def check_homogeneity(
        self, x, xi, tau, theta, scales=(2.0, 5.0), atol: float = 1e-8
    ) -> bool:
        """Numerically verify ``f(t xi, t tau) = t**degree f(xi, tau)``.

        Only points with ``|(xi, tau)| >= excision_radius`` are tested.
        """
        points = _as_points(x, xi, tau, theta)
        keep = np.hypot(points.xi, points.tau) >= self.excision_radius
        base = self.evaluator(points)
        for t in scales:
            scaled = self.evaluator(
                EvaluationPoints(
                    points.x, t * points.xi, t * points.tau, points.theta
                )
            )
            gap = np.abs(scaled - t**self.degree * base)
            gap = np.where(keep[..., None, None], gap, 0.0)
            if np.max(gap, initial=0.0) > atol * max(1.0, t**self.degree):
                return False
        return True


@dataclass(frozen=True, eq=False)
class AngularSymbol:
    """The leading north-pole coefficient as a function of (x, phi, theta)."""

    evaluator: Callable[..., np.ndarray]

    def __call__(self, x, phi, theta) -> np.ndarray:
        x, phi, theta = np.broadcast_arrays(
            *(np.asarray(v, dtype=float) for v in (x, phi, theta))
        )
        return self.evaluator(x, phi, theta)


@dataclass(frozen=True, eq=False)
class LimitFamily:
    """The tau -> infinity limit of a symbol, itself a tau-free symbol.

    ``order`` is the order of the topology in which the limit is taken,
    one more than the order of the symbol it came from.
    """

    symbol: "SymbolExpr"
    order: float
    is_zero: bool = False

    def __call__(self, x, xi, theta) -> np.ndarray:
        return self.symbol.evaluate(x, xi, 0.0, theta)


class SymbolExpr:
    """Base class of every symbol node.

    Subclasses set the structural attributes in ``__init__`` and never
    mutate them afterwards; derived data is cached lazily.
    """

    kind: str = "abstract"

    def __init__(
        self,
        order: float,
        shape: tuple,
        x_dependent: bool = True,
        tau_dependent: bool = True,
        classical: bool = False,
        name: Optional[str] = None,
    ):
        self.order = float(order)
        self.shape = tuple(int(s) for s in shape)
        self.x_dependent = bool(x_dependent)
        self.tau_dependent = bool(tau_dependent)
        self.classical = bool(classical)
        self.name = name

    def __repr__(self):
        label = self.name or self.kind
        return f"{label}(order={self.order:g}, shape={self.shape})"

    # evaluation --------------------------------------------------------
    def evaluate(self, x, xi, tau, theta) -> np.ndarray:
        """Evaluate the full symbol at broadcast points."""
        points = _as_points(x, xi, tau, theta)
        value = self.diff(points)
        if not np.all(np.isfinite(value)):
            bad = np.argwhere(~np.isfinite(value.reshape(points.shape + (-1,))))
            idx = tuple(bad[0][:-1])
            witness = {
                "x": float(points.x[idx]),
                "xi": float(points.xi[idx]),
                "tau": float(points.tau[idx]),
                "theta": float(points.theta[idx]),
            }
            raise NonEvaluable(
                f"{self!r} is not defined at {witness}.", witness=witness
            )
        return value

    def diff(self, points: EvaluationPoints, alpha: int = 0, beta: int = 0):
        """The derivative d_xi^alpha d_x^beta of the symbol at ``points``."""
        if beta > 0 and not self.x_dependent:
            return points.zeros(self.shape)
        key = (id(self), alpha, beta)
        if key not in points._cache:
            points._cache[key] = self._diff(points, alpha, beta)
        return points._cache[key]

    def _diff(self, points, alpha, beta):
        raise NotImplementedError

    # principal data ----------------------------------------------------
    @property
    def principal(self) -> Optional[HomogComponent]:
        return None

    @property
    def angular(self) -> Optional[AngularSymbol]:
        return None

    @cached_property
    def limit(self) -> LimitFamily:
        from skpsi.symbols.limits import limit_family

        return limit_family(self)

    def require_principal(self) -> HomogComponent:
        if self.principal is None:
            raise NoPrincipalData(f"{self!r} carries no principal symbol.")
        return self.principal

    # arithmetic sugar --------------------------------------------------
    def __add__(self, other):
        return Sum([self, _coerce(other, self.shape)])

    def __radd__(self, other):
        return Sum([_coerce(other, self.shape), self])

    def __sub__(self, other):
        return Sum([self, _coerce(other, self.shape)], [1.0, -1.0])

    def __rsub__(self, other):
        return Sum([_coerce(other, self.shape), self], [1.0, -1.0])

    def __neg__(self):
        return Sum([self], [-1.0])

    def __mul__(self, scalar):
        return Sum([self], [complex(scalar)])

    __rmul__ = __mul__

    def __matmul__(self, other):
        return LeibnizProduct(self, other)


def _coerce(value, shape) -> SymbolExpr:
    if isinstance(value, SymbolExpr):
        return value
    return constant(value, shape)


def _finite_difference(value_fn, points, alpha, beta):
    """Central finite differences of order (alpha, beta) in (xi, x)."""
    if alpha + beta > cc.max_derivative_order:
        raise DerivativeOrderTooHigh(
            f"Finite differences of total order {alpha + beta} requested; "
            f"at most {cc.max_derivative_order} are supported."
        )
    if alpha == 0 and beta == 0:
        return value_fn(points)
    if beta > 0:
        h = cc.fd_step
        total = 0.0
        for j in range(beta + 1):
            shifted = points.shifted(x=(beta / 2 - j) * h)
            total = total + (-1) ** j * comb(beta, j) * _finite_difference(
                value_fn, shifted, alpha, 0
            )
        return total / h**beta
    h = cc.fd_step * np.maximum(1.0, np.abs(points.xi))
    total = 0.0
    for j in range(alpha + 1):
        shifted = points.shifted(xi=(alpha / 2 - j) * h)
        total = total + (-1) ** j * comb(alpha, j) * value_fn(shifted)
    return total / (h**alpha)[..., None, None]


class _Leaf(SymbolExpr):
    """A generator with an evaluator and, optionally, closed-form derivatives.

    ``derivative(points, alpha, beta)`` may return ``None`` to request the
    finite-difference fallback.
    """

    def __init__(
        self,
        evaluator,
        order,
        shape,
        derivative=None,
        principal: Optional[HomogComponent] = None,
        angular: Optional[AngularSymbol] = None,
        **kwargs,
    ):
        super().__init__(order, shape, **kwargs)
        self._evaluator = evaluator
        self._derivative = derivative
        self._principal = principal
        self._angular = angular

    def _value(self, points):
        return points.fill(self._evaluator(points), self.shape)

    def _diff(self, points, alpha, beta):
        if self._derivative is not None:
            value = self._derivative(points, alpha, beta)
            if value is not None:
                return points.fill(value, self.shape)
        if alpha == 0 and beta == 0:
            return self._value(points)
        return _finite_difference(self._value, points, alpha, beta)

    @property
    def principal(self):
        return self._principal


class ClassicalParam(_Leaf):
    """A classical parameter-dependent symbol, homogeneous components in
    (xi, tau) jointly."""

    kind = "ClassicalParam"

    def __init__(
        self,
        evaluator,
        order,
        shape=(1, 1),
        components: Sequence[HomogComponent] = (),
        derivative=None,
        x_dependent=False,
        tau_dependent=True,
        name=None,
    ):
        components = tuple(components)
        super().__init__(
            evaluator,
            order,
            shape,
            derivative=derivative,
            principal=components[0] if components else None,
            x_dependent=x_dependent,
            tau_dependent=tau_dependent,
            classical=True,
            name=name,
        )
        self.components = components

    @property
    def angular(self):
        principal = self.principal
        if principal is None:
            return None

        def at_pole(x, phi, theta):
            return principal(x, 0.0 * phi, np.ones_like(phi), theta)

        return AngularSymbol(at_pole)


class FixedSymbol(_Leaf):
    """A tau-independent symbol p(x, xi, theta) of order ``order``."""

    kind = "FixedSymbol"

    def __init__(
        self,
        evaluator,
        order,
        shape=(1, 1),
        principal=None,
        angular=None,
        derivative=None,
        x_dependent=False,
        name=None,
    ):
        super().__init__(
            evaluator,
            order,
            shape,
            derivative=derivative,
            principal=principal,
            angular=angular,
            x_dependent=x_dependent,
            tau_dependent=False,
            classical=False,
            name=name,
        )

    @property
    def angular(self):
        if self._angular is not None:
            return self._angular
        principal, order = self.principal, self.order
        if principal is None or order < 0:
            return None
        if order > 0:
            shape = self.shape
            return AngularSymbol(
                lambda x, phi, theta: np.zeros(np.shape(x) + shape, complex)
            )
        return AngularSymbol(
            lambda x, phi, theta: principal(x, phi, np.zeros_like(phi), theta)
        )


class RawSymbol(_Leaf):
    """A symbol known only through its evaluator; no principal data."""

    kind = "Raw"

    def __init__(
        self,
        evaluator,
        order,
        shape=(1, 1),
        derivative=None,
        x_dependent=False,
        tau_dependent=True,
        name=None,
    ):
        super().__init__(
            evaluator,
            order,
            shape,
            derivative=derivative,
            x_dependent=x_dependent,
            tau_dependent=tau_dependent,
            name=name,
        )


class TaylorHomogeneous(SymbolExpr):
    """chi(xi) t((xi, tau) / |(xi, tau)|) for Taylor data ``t`` on the
    punctured semi-sphere."""

    kind = "TaylorHomogeneous"

    def __init__(self, taylor, radius: float = 1.0, shape=None, name=None):
        sample = np.asarray(taylor.evaluator(0.0, 1.0, 0.5, 0.0))
        shape = shape or (sample.shape[-2:] if sample.ndim >= 2 else (1, 1))
        super().__init__(
            0.0,
            shape,
            x_dependent=taylor.x_dependent,
            tau_dependent=True,
            name=name,
        )
        self.taylor = taylor
        self.radius = float(radius)

    def _polar(self, points):
        r = np.hypot(points.xi, points.tau)
        ratio = np.clip(points.tau / np.where(r > 0, r, 1.0), -1.0, 1.0)
        phi = np.where(points.xi >= 0, 1.0, -1.0)
        return phi, np.arccos(ratio), r

    def _value(self, points):
        phi, rho, _ = self._polar(points)
        chi = excision(points.xi, self.radius)
        live = chi > 0
        values = self.taylor.evaluator(
            points.x, phi, np.where(live, rho, np.pi / 4), points.theta
        )
        values = points.fill(values, self.shape)
        return np.where(live[..., None, None], chi[..., None, None] * values, 0)

    def _diff(self, points, alpha, beta):
        return _finite_difference(self._value, points, alpha, beta)

    @property
    def principal(self):
        def homogeneous(points):
            phi, rho, _ = self._polar(points)
            return points.fill(
                self.taylor.evaluator(points.x, phi, rho, points.theta),
                self.shape,
            )

        return HomogComponent(0.0, homogeneous, self.radius)

    @property
    def angular(self):
        leading, shape = self.taylor.coefficients[0], self.shape

        def evaluator(x, phi, theta):
            value = np.asarray(leading(x, phi, theta), dtype=complex)
            if value.shape == np.shape(x):
                return value[..., None, None] * np.ones(shape)
            return np.broadcast_to(value, np.shape(x) + shape)

        return AngularSymbol(evaluator)


class SmoothingSymbol(SymbolExpr):
    """A smoothing family re-embedded into the calculus.

    It has no pointwise symbol on continuous xi; it only enters through its
    matrices when quantized.
    """

    kind = "SmoothingKernel"

    def __init__(self, kernel, name=None):
        super().__init__(
            -np.inf,
            kernel.fiber_shape,
            x_dependent=True,
            tau_dependent=True,
            name=name,
        )
        self.kernel = kernel
        self.vanishing_at_infinity = kernel.vanishing_at_infinity

    def _diff(self, points, alpha, beta):
        raise NonEvaluable(
            "Smoothing kernels are defined through their matrices only."
        )

    @property
    def angular(self):
        shape = self.shape
        return AngularSymbol(
            lambda x, phi, theta: np.zeros(np.shape(x) + shape, complex)
        )


class Sum(SymbolExpr):
    """A linear combination of symbols of the same shape.

    ``order`` may be declared below the children's maximum when the
    leading parts are known to cancel.
    """

    kind = "Sum"

    def __init__(self, children, coefficients=None, order=None, name=None):
        children = list(children)
        if not children:
            raise ShapeMismatch("A sum needs at least one term.")
        shapes = {c.shape for c in children}
        if len(shapes) != 1:
            raise ShapeMismatch(f"Cannot add symbols of shapes {shapes}.")
        if coefficients is None:
            coefficients = [1.0] * len(children)
        top = max(c.order for c in children)
        super().__init__(
            top if order is None else order,
            children[0].shape,
            x_dependent=any(c.x_dependent for c in children),
            tau_dependent=any(c.tau_dependent for c in children),
            classical=all(c.classical for c in children),
            name=name,
        )
        self.children = children
        self.coefficients = [complex(c) for c in coefficients]
        self.declared = order is not None and order < top

    def _diff(self, points, alpha, beta):
        total = points.zeros(self.shape)
        for c, child in zip(self.coefficients, self.children):
            if c != 0:
                total = total + c * child.diff(points, alpha, beta)
        return total

    def _leading(self):
        if self.declared:
            return None
        return [
            (c, child)
            for c, child in zip(self.coefficients, self.children)
            if child.order == self.order
        ]

    @property
    def principal(self):
        leading = self._leading()
        if not leading or any(ch.principal is None for _, ch in leading):
            return None

        def combined(points):
            return sum(c * ch.principal.evaluator(points) for c, ch in leading)

        return HomogComponent(self.order, combined)

    @property
    def angular(self):
        leading = self._leading()
        if not leading or any(ch.angular is None for _, ch in leading):
            return None
        return AngularSymbol(
            lambda x, phi, theta: sum(
                c * ch.angular(x, phi, theta) for c, ch in leading
            )
        )


class LeibnizProduct(SymbolExpr):
    """The truncated composition sum_{j<=N} (1/j!) d_xi^j a . D_x^j b."""

    kind = "LeibnizProduct"

    def __init__(self, left, right, N: Optional[int] = None, name=None):
        N = cc.leibniz_order if N is None else int(N)
        if N > cc.max_leibniz_order or N < 0:
            raise TruncationTooDeep(
                f"Leibniz truncation N={N} outside 0..{cc.max_leibniz_order}."
            )
        if left.shape[1] != right.shape[0]:
            raise ShapeMismatch(
                f"Cannot compose shapes {left.shape} and {right.shape}."
            )
        super().__init__(
            left.order + right.order,
            (left.shape[0], right.shape[1]),
            x_dependent=left.x_dependent or right.x_dependent,
            tau_dependent=left.tau_dependent or right.tau_dependent,
            classical=left.classical and right.classical,
            name=name,
        )
        self.left, self.right, self.N = left, right, N

    def _diff(self, points, alpha, beta):
        a, b = self.left, self.right
        depth = self.N if b.x_dependent else 0
        total = points.zeros(self.shape)
        for j in range(depth + 1):
            weight = (-1j) ** j / factorial(j)
            for g in range(alpha + 1):
                for d in range(beta + 1):
                    if d > 0 and not a.x_dependent:
                        continue
                    c = weight * comb(alpha, g) * comb(beta, d)
                    total = total + c * np.matmul(
                        a.diff(points, j + g, d),
                        b.diff(points, alpha - g, j + beta - d),
                    )
        return total

    @property
    def principal(self):
        pa, pb = self.left.principal, self.right.principal
        if pa is None or pb is None:
            return None
        def product(points):
            return np.matmul(pa.evaluator(points), pb.evaluator(points))

        return HomogComponent(self.order, product)

    @property
    def angular(self):
        sa, sb = self.left.angular, self.right.angular
        if sa is None or sb is None:
            return None
        def product(x, phi, theta):
            return np.matmul(sa(x, phi, theta), sb(x, phi, theta))

        return AngularSymbol(product)


class Adjoint(SymbolExpr):
    """The truncated adjoint sum_{j<=N} (1/j!) d_xi^j D_x^j a*."""

    kind = "Adjoint"

    def __init__(self, child, N: Optional[int] = None, name=None):
        N = cc.leibniz_order if N is None else int(N)
        if N > cc.max_leibniz_order or N < 0:
            raise TruncationTooDeep(
                f"Adjoint truncation N={N} outside 0..{cc.max_leibniz_order}."
            )
        super().__init__(
            child.order,
            child.shape[::-1],
            x_dependent=child.x_dependent,
            tau_dependent=child.tau_dependent,
            classical=child.classical,
            name=name,
        )
        self.child, self.N = child, N

    def _diff(self, points, alpha, beta):
        depth = self.N if self.child.x_dependent else 0
        total = points.zeros(self.shape)
        for j in range(depth + 1):
            weight = (-1j) ** j / factorial(j)
            total = total + weight * _conj_t(
                self.child.diff(points, j + alpha, j + beta)
            )
        return total

    @property
    def principal(self):
        p = self.child.principal
        if p is None:
            return None
        return HomogComponent(
            self.order, lambda points: _conj_t(p.evaluator(points))
        )

    @property
    def angular(self):
        s = self.child.angular
        if s is None:
            return None
        return AngularSymbol(lambda x, phi, theta: _conj_t(s(x, phi, theta)))


class ExcisedInverse(SymbolExpr):
    """chi(xi / radius) a^{-1}, or the plain pointwise inverse when
    ``excise`` is false."""

    kind = "ExcisedInverse"

    def __init__(
        self, child, excise: bool = True, radius: float = 1.0, name=None
    ):
        if child.shape[0] != child.shape[1]:
            raise ShapeMismatch(f"Cannot invert a {child.shape} symbol.")
        super().__init__(
            -child.order,
            child.shape,
            x_dependent=child.x_dependent,
            tau_dependent=child.tau_dependent,
            classical=child.classical,
            name=name,
        )
        self.child = child
        self.excise = bool(excise)
        self.radius = float(radius)

    def _inverse_derivatives(self, points, alpha, beta):
        key = (id(self), "inverse")
        table = points._cache.setdefault(key, {})
        if (alpha, beta) in table:
            return table[(alpha, beta)]
        if (alpha, beta) == (0, 0):
            value = self.child.diff(points, 0, 0)
            if self.excise:
                live = np.abs(points.xi) > self.radius / 2
                eye = np.eye(self.shape[0])
                value = np.where(live[..., None, None], value, eye)
            try:
                inverse = np.linalg.inv(value)
            except np.linalg.LinAlgError as err:
                raise SingularAtPoint(
                    f"{self.child!r} is singular on the evaluation grid."
                ) from err
            table[(0, 0)] = inverse
            return inverse
        # a u = 1 differentiated: sum_{nu <= m} C(m, nu) a_nu u_{m - nu} = 0
        inverse = self._inverse_derivatives(points, 0, 0)
        total = points.zeros(self.shape)
        for g in range(alpha + 1):
            for d in range(beta + 1):
                if g == 0 and d == 0:
                    continue
                if d > 0 and not self.child.x_dependent:
                    continue
                total = total + comb(alpha, g) * comb(beta, d) * np.matmul(
                    self.child.diff(points, g, d),
                    self._inverse_derivatives(points, alpha - g, beta - d),
                )
        value = -np.matmul(inverse, total)
        table[(alpha, beta)] = value
        return value

    def _diff(self, points, alpha, beta):
        if not self.excise:
            return self._inverse_derivatives(points, alpha, beta)
        total = points.zeros(self.shape)
        for g in range(alpha + 1):
            chi = excision(points.xi, self.radius, g)
            if not np.any(chi):
                continue
            total = total + comb(alpha, g) * chi[..., None, None] * (
                self._inverse_derivatives(points, alpha - g, beta)
            )
        return total

    @property
    def principal(self):
        p = self.child.principal
        if p is None:
            return None
        return HomogComponent(
            self.order, lambda points: np.linalg.inv(p.evaluator(points))
        )

    @property
    def angular(self):
        s = self.child.angular
        if s is None:
            return None
        return AngularSymbol(
            lambda x, phi, theta: np.linalg.inv(s(x, phi, theta))
        )


def constant(value, shape=(1, 1), name=None) -> ClassicalParam:
    """A constant matrix symbol; scalars are multiplied by the identity."""
    value = np.asarray(value, dtype=complex)
    if value.ndim == 0:
        value = value * np.eye(shape[0], shape[1])
    shape = value.shape

    def evaluator(points):
        return points.fill(value, shape)

    def derivative(points, alpha, beta):
        if alpha == 0 and beta == 0:
            return None
        return points.zeros(shape)

    component = HomogComponent(0.0, evaluator)
    return ClassicalParam(
        evaluator,
        0.0,
        shape,
        components=[component],
        derivative=derivative,
        tau_dependent=False,
        name=name or "constant",
    )


def identity(n: int = 1) -> ClassicalParam:
    return constant(1.0, (n, n), name="identity")


def zero(shape=(1, 1)) -> ClassicalParam:
    return constant(0.0, shape, name="zero")
