"""Numerical seminorms: weighted sups of symbol derivatives over a grid."""

import logging
from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np

from skpsi.config import calculus_config as cc
from skpsi.exceptions import DerivativeOrderTooHigh, NonEvaluable
from skpsi.symbols.base import EvaluationPoints, SymbolExpr
from skpsi.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

__all__ = ["SeminormSpec", "estimate_seminorm", "tau_derivative"]


@dataclass(frozen=True)
class SeminormSpec:
    """Derivative orders and weights of one symbol seminorm.

    With ``gamma`` unset the classical weight <xi, tau>^{-(mu - alpha - k)}
    is used. With ``gamma`` set the mixed weight
    <xi>^{-(mu - alpha)} <xi, tau>^{-(gamma - k)} is used instead, which
    covers fixed symbols (``gamma = 0``) and compositions of fixed symbols
    with order reductions.
    """

    alpha: int = 0
    beta: int = 0
    k: int = 0
    mu: float = 0.0
    gamma: Optional[float] = None

    def __post_init__(self):
        for name in ("alpha", "beta", "k"):
            value = getattr(self, name)
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}.")
            if value > cc.max_derivative_order:
                raise DerivativeOrderTooHigh(
                    f"{name}={value} exceeds {cc.max_derivative_order}."
                )

    def weight(self, xi, tau) -> np.ndarray:
        bracket_xt = np.sqrt(1.0 + xi**2 + tau**2)
        if self.gamma is None:
            return bracket_xt ** (-(self.mu - self.alpha - self.k))
        bracket_x = np.sqrt(1.0 + xi**2)
        return bracket_x ** (-(self.mu - self.alpha)) * bracket_xt ** (
            -(self.gamma - self.k)
        )


def tau_derivative(
    a: SymbolExpr, points: EvaluationPoints, alpha: int, beta: int, k: int
) -> np.ndarray:
    """d_xi^alpha d_x^beta d_tau^k a, the tau-part by central differences."""
    if k == 0:
        return a.diff(points, alpha, beta)
    h = cc.fd_step * np.maximum(1.0, np.abs(points.tau))
    total = 0.0
    for j in range(k + 1):
        shifted = points.shifted(tau=(k / 2 - j) * h)
        total = total + (-1) ** j * comb(k, j) * a.diff(shifted, alpha, beta)
    return total / (h**k)[..., None, None]


def _pointwise_norm(values: np.ndarray) -> np.ndarray:
    if values.shape[-2:] == (1, 1):
        return np.abs(values[..., 0, 0])
    return np.linalg.norm(values, ord=2, axis=(-2, -1))


def estimate_seminorm(
    a: SymbolExpr,
    spec: SeminormSpec,
    strip,
    grid,
    xi_samples=None,
    n_jobs: int = None,
) -> float:
    """Weighted sup of |D_xi^alpha D_x^beta D_tau^k a| over the sampled grid.

    Parameters
    ----------
    a : SymbolExpr
        The symbol to measure.
    spec : SeminormSpec
        Derivative orders and weight exponents.
    strip : ParameterStrip
        Supplies the tau and theta samples.
    grid : CircleGrid
        Supplies the x samples and, unless ``xi_samples`` is given, the
        integer frequencies -K..K used as xi samples.
    xi_samples : array_like, optional
        Explicit xi samples.
    n_jobs : int, optional
        Parallelize over tau samples with joblib.

    Returns
    -------
    float
        The maximum of the weighted derivative norm over the grid.

    Raises
    ------
    NonEvaluable
        If the symbol is undefined at a sample point.
    DerivativeOrderTooHigh
        If an order exceeds the finite-difference limit.

    Examples
    --------
    >>> from skpsi.core import CircleGrid, ParameterStrip
    >>> from skpsi.symbols.base import identity
    >>> strip = ParameterStrip.log_spaced(0.0, 0.0, 0, 2, 2)
    >>> estimate_seminorm(identity(), SeminormSpec(), strip, CircleGrid(4))
    1.0
    """
    xi = grid.frequencies if xi_samples is None else np.asarray(xi_samples)
    x = grid.x_samples if a.x_dependent or spec.beta else np.zeros(1)
    x = x[:, None, None]
    xi = np.asarray(xi, dtype=float)[None, :, None]
    theta = np.asarray(strip.theta_samples)[None, None, :]

    def at_tau(tau):
        points = EvaluationPoints(x, xi, tau, theta)
        values = tau_derivative(a, points, spec.alpha, spec.beta, spec.k)
        if not np.all(np.isfinite(values)):
            # raises NonEvaluable with the offending point
            a.evaluate(points.x, points.xi, points.tau, points.theta)
            raise NonEvaluable(f"Derivative of {a!r} is not finite.")
        weighted = _pointwise_norm(values) * spec.weight(points.xi, tau)
        return float(np.max(weighted))

    sups = parallel_map(at_tau, strip.tau_samples, n_jobs=n_jobs)
    logger.debug("Seminorm %s of %r per tau: %s", spec, a, sups)
    return max(sups)
