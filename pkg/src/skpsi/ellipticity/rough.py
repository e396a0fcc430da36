"""Parameter-ellipticity in the rough calculus: conditions (I) and (II).

(I) asks for invertibility of a(x, xi, lambda) with |a^-1| <~ <xi>^-mu
whenever |xi| >= C; (II) asks for invertibility of the limit-family on
L^2 for every theta.
"""

import logging
from typing import Optional

import numpy as np

from skpsi.config import calculus_config as cc
from skpsi.core.grid import CircleGrid
from skpsi.core.strip import ParameterStrip
from skpsi.ellipticity.report import (
    EllipticityReport,
    sigma3_certificate,
    smallest_singular_values,
)
from skpsi.ellipticity.search import refine_minimum
from skpsi.exceptions import ReportFailed
from skpsi.symbols.base import ExcisedInverse, LimitFamily, SymbolExpr

logger = logging.getLogger(__name__)

__all__ = ["check_rough", "excised_inverse", "limit_matrix"]


def limit_matrix(limit: LimitFamily, theta: float, K: int) -> np.ndarray:
    """The quantized limit-family at angle ``theta``."""
    from skpsi.quantization import quantize

    N1, N0 = limit.symbol.shape
    if limit.is_zero:
        return np.zeros(((2 * K + 1) * N1, (2 * K + 1) * N0), dtype=complex)
    return quantize(limit.symbol, (0.0, theta), K).matrix


def _condition_one(a, strip, grid, mu, C):
    k = grid.frequencies
    xi = k[np.abs(k) >= C]
    x = grid.x_samples if a.x_dependent else np.zeros(1)
    thetas = np.asarray(strip.theta_samples)
    weight = (1.0 + xi**2) ** (-mu / 2)

    best = (np.inf, None)
    for tau in strip.tau_samples:
        values = a.evaluate(x[:, None, None], xi[None, :, None], tau, thetas)
        scaled = smallest_singular_values(values) * weight[None, :, None]
        idx = np.unravel_index(np.argmin(scaled), scaled.shape)
        if scaled[idx] < best[0]:
            log_tau = np.log(tau) if tau > 0 else 0.0
            start = [x[idx[0]], xi[idx[1]], log_tau, thetas[idx[2]]]
            best = (float(scaled[idx]), start)
    value, start = best

    sign = np.sign(start[1]) or 1.0
    taus = strip.tau_samples[strip.tau_samples > 0]
    xi_bounds = (C, grid.K) if sign > 0 else (-grid.K, -C)

    def objective(p):
        tau = np.exp(p[2])
        v = a.evaluate(p[0], p[1], tau, p[3])
        return float(
            smallest_singular_values(v) * (1.0 + p[1] ** 2) ** (-mu / 2)
        )

    if taus.size:
        point, value = refine_minimum(
            objective,
            start,
            [
                (start[0], start[0]),
                xi_bounds,
                (np.log(taus[0]), np.log(taus[-1])),
                (strip.theta_min, strip.theta_max),
            ],
        )
    else:
        point = np.asarray(start)
    witness = {
        "condition": "I",
        "x": float(point[0]),
        "xi": float(point[1]),
        "tau": float(np.exp(point[2])),
        "theta": float(point[3]),
        "value": value,
    }
    return value, witness


def check_rough(
    a: SymbolExpr,
    strip: ParameterStrip,
    grid: Optional[CircleGrid] = None,
    mu: Optional[float] = None,
    C: Optional[float] = None,
) -> EllipticityReport:
    """Test conditions (I) and (II) on the sample grid.

    (I) samples the smallest singular value of a, weighted by <xi>^-mu,
    over integer |xi| >= C, and polishes the worst sample by a local
    search. (II) runs the K-doubling certificate on the quantized
    limit-family.

    Raises
    ------
    NotInCalculus
        If ``a`` has no structural limit-family.
    """
    grid = grid or CircleGrid(cc.K_test)
    mu = a.order if mu is None else mu
    C = cc.ellipticity_C if C is None else C
    threshold = cc.invertibility_threshold

    value, witness = _condition_one(a, strip, grid, mu, C)
    limit = a.limit
    certificate = sigma3_certificate(
        lambda theta, K: limit_matrix(limit, theta, K),
        strip.theta_samples,
        grid.K,
    )
    verdicts = {"I": value >= threshold, "II": certificate.passed}
    constants = {
        "I": 1.0 / value if value > 0 else np.inf,
        "II": 1.0 / certificate.smallest_K
        if certificate.smallest_K > 0
        else np.inf,
    }
    if not verdicts["I"]:
        failure = witness
    elif not verdicts["II"]:
        failure = {
            "condition": "II",
            "theta": certificate.theta,
            "value": certificate.smallest_K,
        }
    else:
        failure = None
    logger.debug("Rough ellipticity verdicts %s", verdicts)
    return EllipticityReport("rough", verdicts, failure, constants, certificate)


def excised_inverse(
    a: SymbolExpr, report: EllipticityReport, radius: Optional[float] = None
) -> ExcisedInverse:
    """b = chi(xi) a^-1 of order -mu.

    Raises
    ------
    ReportFailed
        If ``report`` does not pass.

    Examples
    --------
    >>> from skpsi.symbols import constant
    >>> report = EllipticityReport("rough", {"I": True, "II": True})
    >>> b = excised_inverse(constant(2.0), report)
    >>> complex(b.evaluate(0.0, 3.0, 1.0, 0.0).item())
    (0.5+0j)
    """
    if not report.passed:
        raise ReportFailed(
            f"Cannot invert: conditions {report.failed_conditions} fail.",
            report=report,
        )
    radius = max(1.0, cc.ellipticity_C) if radius is None else radius
    return ExcisedInverse(a, excise=True, radius=radius, name="excised-inverse")
