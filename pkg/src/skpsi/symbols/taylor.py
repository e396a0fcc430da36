"""Taylor asymptotics at the north-pole (xi, tau) = (0, 1).

Functions on the punctured upper semi-sphere are written in polar
coordinates xi = sin(rho) phi, tau = cos(rho), with phi = +1 or -1 on the
circle, and expanded as sum_j rho^j t_j(phi).
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from skpsi.config import calculus_config as cc
from skpsi.exceptions import (
    ExpansionDiverges,
    NoPrincipalData,
    SingularAtPoint,
    SingularLeadingCoefficient,
)
from skpsi.symbols.base import AngularSymbol, SymbolExpr, TaylorHomogeneous
from skpsi.utils.fitting import fit_loglog

logger = logging.getLogger(__name__)

__all__ = [
    "TaylorData",
    "taylor_expand_northpole",
    "homog_extend",
    "invert_taylor",
    "angular_symbol",
]

CHECK_RHOS = (0.1, 0.05, 0.025)
CHECK_THETAS = tuple(np.linspace(0.0, 2 * np.pi, 5)[:-1])
EXACT_REMAINDER = 1e-13


def _check_xs(x_dependent: bool) -> tuple:
    return (0.0, np.pi / 3) if x_dependent else (0.0,)


@dataclass(frozen=True, eq=False)
class TaylorData:
    """A function t(x, phi, rho, theta) with its north-pole coefficients.

    ``coefficients[j]`` maps (x, phi, theta) to t_j; there are ``depth`` of
    them.
    """

    evaluator: Callable[..., np.ndarray]
    coefficients: Sequence[Callable[..., np.ndarray]]
    depth: int
    x_dependent: bool = False
    remainder_slopes: dict = field(default_factory=dict)

    def partial_sum(self, x, phi, rho, theta, ell: int) -> np.ndarray:
        total = 0.0
        for j in range(ell + 1):
            total = total + rho**j * _matrix(
                self.coefficients[j](x, phi, theta), x, phi, rho, theta
            )
        return total


def _field_shape(*coords):
    return np.broadcast_shapes(*(np.shape(c) for c in coords))


def _matrix(values, *coords) -> np.ndarray:
    """View ``values`` as a matrix field over the broadcast of ``coords``."""
    return _as_matrix_field(values, _field_shape(*coords))


def _as_matrix_field(values, base_shape) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    if values.shape == tuple(base_shape):
        return values[..., None, None]
    if values.shape[: len(base_shape)] != tuple(base_shape):
        values = np.broadcast_to(values, tuple(base_shape) + values.shape[-2:])
    return values


def _richardson(evaluator, depth, rho0, levels):
    """Extract t_0..t_{depth-1} by extrapolating divided differences to 0."""
    nodes = rho0 * 0.5 ** np.arange(levels)

    def extract(x, phi, theta):
        base = _field_shape(x, phi, theta)
        samples = np.stack(
            [_as_matrix_field(evaluator(x, phi, h, theta), base) for h in nodes]
        )
        flat = samples.reshape(levels, -1)
        coefficients = []
        residual = flat.copy()
        for j in range(depth):
            divided = residual / nodes[:, None] ** j
            fit = P.polyfit(nodes, divided, levels - 1)
            c_j = fit[0]
            coefficients.append(c_j.reshape(samples.shape[1:]))
            residual = residual - c_j[None, :] * nodes[:, None] ** j
        return coefficients

    return extract


def _remainder(data, x, phi, rho, theta, ell) -> float:
    value = _matrix(data.evaluator(x, phi, rho, theta), x, rho)
    return np.max(np.abs(value - data.partial_sum(x, phi, rho, theta, ell)))


def _remainder_slopes(data: TaylorData, epsilon: float, xs) -> dict:
    slopes = {}
    rhos = np.asarray(CHECK_RHOS)
    for ell in range(data.depth):
        worst = np.inf
        for x in xs:
            for phi in (1.0, -1.0):
                for theta in CHECK_THETAS:
                    remainders = np.array(
                        [_remainder(data, x, phi, r, theta, ell) for r in rhos]
                    )
                    if np.max(remainders) < EXACT_REMAINDER:
                        continue
                    slope, _ = fit_loglog(
                        rhos, np.maximum(remainders, EXACT_REMAINDER)
                    )
                    if slope < worst:
                        worst = slope
                    if slope < ell + 1 - epsilon:
                        raise ExpansionDiverges(
                            f"Remainder after order {ell} decays like "
                            f"rho^{slope:.3f}, expected at least "
                            f"rho^{ell + 1 - epsilon:.3f}.",
                            witness={
                                "ell": ell,
                                "x": float(x),
                                "phi": phi,
                                "theta": float(theta),
                                "slope": slope,
                            },
                        )
        slopes[ell] = worst
    return slopes


def taylor_expand_northpole(
    evaluator: Callable[..., np.ndarray],
    L: int = 3,
    x_dependent: bool = False,
    epsilon: float = 0.1,
    rho0: float = 0.4,
    levels: int = 8,
) -> TaylorData:
    """Expand ``evaluator(x, phi, rho, theta)`` at rho = 0 up to depth L.

    Coefficients come from Richardson extrapolation of divided differences
    on the nodes rho0 * 2**-m. Each remainder after order ell < L is then
    checked to decay at least like rho**(ell + 1 - epsilon) on
    rho in {0.1, 0.05, 0.025}.

    Raises
    ------
    ExpansionDiverges
        If a measured remainder slope is too small.

    Examples
    --------
    >>> data = taylor_expand_northpole(lambda x, phi, rho, theta: rho, L=2)
    >>> [round(abs(c(0.0, 1.0, 0.0).item()), 8) for c in data.coefficients]
    [0.0, 1.0]
    """
    extract = _richardson(evaluator, L, rho0, levels)
    coefficients = [
        (lambda x, phi, theta, j=j: extract(x, phi, theta)[j]) for j in range(L)
    ]
    data = TaylorData(evaluator, coefficients, L, x_dependent)
    slopes = _remainder_slopes(data, epsilon, _check_xs(x_dependent))
    logger.debug("North-pole remainder slopes: %s", slopes)
    return TaylorData(evaluator, coefficients, L, x_dependent, slopes)


def homog_extend(t: TaylorData, radius: float = 1.0) -> TaylorHomogeneous:
    """The order-zero symbol chi(xi) t((xi, tau) / |(xi, tau)|).

    Examples
    --------
    >>> data = taylor_expand_northpole(lambda x, phi, rho, theta: rho, L=2)
    >>> a = homog_extend(data)
    >>> round(a.evaluate(0.0, 1.0, 1.0, 0.0).real.item(), 12)
    0.785398163397
    """
    return TaylorHomogeneous(t, radius, name="taylor-homogeneous")


def invert_taylor(
    t: TaylorData, thetas=CHECK_THETAS, n_rho: int = 16
) -> TaylorData:
    """Pointwise inverse of ``t`` with its coefficients by series inversion.

    (t^-1)_0 = t_0^-1 and (t^-1)_n = -t_0^-1 sum_{j=1}^n t_j (t^-1)_{n-j}.

    Raises
    ------
    SingularAtPoint
        If t is not invertible at some (x, phi, rho, theta) of the check
        grid; x-dependent data is checked at the same x as its expansion.
    SingularLeadingCoefficient
        If t_0 is not invertible.
    """
    threshold = cc.invertibility_threshold
    rhos = np.linspace(cc.rho_min, np.pi / 2, n_rho)
    for x, phi, theta in product(
        _check_xs(t.x_dependent), (1.0, -1.0), thetas
    ):
        lead = _matrix(t.coefficients[0](x, phi, theta))
        if np.min(np.linalg.svd(lead, compute_uv=False)) < threshold:
            raise SingularLeadingCoefficient(
                f"Leading coefficient is singular at x={x:.4f}, "
                f"phi={phi}, theta={theta:.4f}.",
                witness={"x": x, "phi": phi, "theta": float(theta)},
            )
        for rho in rhos:
            value = _matrix(t.evaluator(x, phi, rho, theta))
            if np.min(np.linalg.svd(value, compute_uv=False)) < threshold:
                raise SingularAtPoint(
                    f"Taylor data is singular at x={x:.4f}, phi={phi}, "
                    f"rho={rho:.4f}, theta={theta:.4f}.",
                    witness={
                        "x": x,
                        "phi": phi,
                        "rho": float(rho),
                        "theta": float(theta),
                    },
                )

    def inverse_coefficients(x, phi, theta):
        lead_inv = np.linalg.inv(
            _matrix(t.coefficients[0](x, phi, theta), x, phi, theta)
        )
        out = [lead_inv]
        for n in range(1, t.depth):
            total = 0.0
            for j in range(1, n + 1):
                total = total + np.matmul(
                    _matrix(t.coefficients[j](x, phi, theta), x, phi, theta),
                    out[n - j],
                )
            out.append(-np.matmul(lead_inv, total))
        return out

    def evaluator(x, phi, rho, theta):
        return np.linalg.inv(
            _matrix(t.evaluator(x, phi, rho, theta), x, phi, rho, theta)
        )

    coefficients = [
        (lambda x, phi, theta, n=n: inverse_coefficients(x, phi, theta)[n])
        for n in range(t.depth)
    ]
    return TaylorData(evaluator, coefficients, t.depth, t.x_dependent)


def angular_symbol(a: SymbolExpr) -> AngularSymbol:
    """The angular symbol: the north-pole limit of the principal symbol.

    Raises
    ------
    NoPrincipalData
        If ``a`` carries neither a classical nor a Taylor leading part.
    """
    angular = a.angular
    if angular is None:
        raise NoPrincipalData(f"{a!r} has no angular symbol.")
    return angular
