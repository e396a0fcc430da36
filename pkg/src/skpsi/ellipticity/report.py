"""Result records of the ellipticity checks and parametrix constructions."""

import logging
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np
import pandas as pd
from scipy import linalg

from skpsi.config import calculus_config as cc
from skpsi.symbols.base import (
    AngularSymbol,
    HomogComponent,
    LimitFamily,
    SymbolExpr,
)
from skpsi.symbols.taylor import angular_symbol
from skpsi.warnings import HeuristicCertificateWarning

logger = logging.getLogger(__name__)

__all__ = [
    "Sigma3Certificate",
    "EllipticityReport",
    "ParametrixResult",
    "PrincipalTriple",
    "principal_triple",
    "sigma3_certificate",
    "smallest_singular_values",
]


def smallest_singular_values(values: np.ndarray) -> np.ndarray:
    """Pointwise smallest singular value of a matrix field (..., N1, N0)."""
    if values.shape[-2:] == (1, 1):
        return np.abs(values[..., 0, 0])
    return np.linalg.svd(values, compute_uv=False)[..., -1]


@dataclass
class Sigma3Certificate:
    """Smallest singular values of a quantized limit family at K and 2K.

    Invertibility on L^2 cannot be decided at finite K; stability of the
    smallest singular value under doubling is used as a proxy.
    """

    K: int
    smallest_K: float
    smallest_2K: float
    drift: float
    passed: bool
    theta: Optional[float] = None
    heuristic: bool = True


def sigma3_certificate(
    matrix_at: Callable[[float, int], np.ndarray], thetas, K: int
) -> Sigma3Certificate:
    """Doubling certificate for the family ``matrix_at(theta, K)``.

    The reported values are minima over ``thetas``; ``theta`` records where
    the minimum at K is attained.
    """
    lows, highs = [], []
    for theta in thetas:
        lows.append(_smallest(matrix_at(theta, K)))
        highs.append(_smallest(matrix_at(theta, 2 * K)))
    worst = int(np.argmin(lows))
    low, high = float(min(lows)), float(min(highs))
    scale = max(low, high)
    drift = abs(low - high) / scale if scale > 0 else 0.0
    threshold = cc.invertibility_threshold
    passed = min(low, high) >= threshold and drift < cc.doubling_drift
    if passed and drift > cc.doubling_drift / 2:
        warnings.warn(
            f"Limit-family certificate drifts by {100 * drift:.1f}% under "
            "K-doubling; invertibility on L^2 is uncertain.",
            category=HeuristicCertificateWarning,
            stacklevel=2,
        )
    logger.debug("sigma3 at K=%d: %.3e, at 2K: %.3e", K, low, high)
    return Sigma3Certificate(K, low, high, drift, passed, float(thetas[worst]))


def _smallest(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return np.inf
    return float(linalg.svdvals(matrix)[-1])


@dataclass
class EllipticityReport:
    """Verdicts of one ellipticity check.

    ``verdicts`` maps condition names to pass/fail, ``constants`` the same
    names to the measured inverse bounds. Failing reports carry a
    ``witness`` describing the point where invertibility is lost.
    """

    calculus: str
    verdicts: dict
    witness: Optional[dict] = None
    constants: dict = field(default_factory=dict)
    sigma3_certificate: Optional[Sigma3Certificate] = None

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    @property
    def failed_conditions(self) -> list:
        return [name for name, ok in self.verdicts.items() if not ok]

    def to_dict(self) -> dict:
        out = {
            "calculus": self.calculus,
            "passed": self.passed,
            "verdicts": dict(self.verdicts),
            "constants": {k: float(v) for k, v in self.constants.items()},
            "witness": self.witness,
        }
        if self.sigma3_certificate is not None:
            out["sigma3_certificate"] = asdict(self.sigma3_certificate)
        return out


@dataclass
class ParametrixResult:
    """A parametrix b with its smoothing tail and oracle-measured residuals.

    ``residuals`` has columns tau, theta, residual_left, residual_right and
    oracle_gap; ``operators`` maps each lambda to the quantized parametrix
    plus tail.
    """

    symbol: SymbolExpr
    neumann_depth: int
    tau_threshold: float
    tau_threshold_per_theta: dict
    residuals: pd.DataFrame
    tail: object
    report: EllipticityReport
    operators: dict = field(default_factory=dict, repr=False)

    def past_threshold(self) -> pd.DataFrame:
        return self.residuals[self.residuals.tau >= self.tau_threshold]

    def max_residual(self) -> float:
        rows = self.past_threshold()
        if rows.empty:
            return np.inf
        return float(rows[["residual_left", "residual_right"]].to_numpy().max())


@dataclass(frozen=True)
class PrincipalTriple:
    """The three principal data of a weakly classical symbol."""

    principal: HomogComponent
    angular: AngularSymbol
    limit: LimitFamily


def principal_triple(a: SymbolExpr) -> PrincipalTriple:
    """Collect sigma_1, sigma_2 and sigma_3 of ``a``.

    Raises
    ------
    NoPrincipalData
        If ``a`` has no homogeneous principal symbol or angular symbol.
    NotInCalculus
        If ``a`` has no structural limit-family.
    """
    return PrincipalTriple(a.require_principal(), angular_symbol(a), a.limit)
