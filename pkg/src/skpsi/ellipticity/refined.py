"""Parameter-ellipticity in the refined calculus.

The principal symbol is tested on the unit semicircle {(xi, tau)} away
from the north-pole, the angular symbol at the pole, and the limit-family
on L^2 through the doubling certificate.
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
from skpsi.ellipticity.rough import check_rough, limit_matrix
from skpsi.ellipticity.search import refine_minimum
from skpsi.symbols.base import SymbolExpr
from skpsi.symbols.taylor import angular_symbol

logger = logging.getLogger(__name__)

__all__ = ["check_refined", "check_ellipticity", "cosphere_samples"]

N_RHO = 64


def cosphere_samples(x_dependent: bool, grid: CircleGrid, n_rho: int = N_RHO):
    """Sample points (x, phi, rho) of the pole-punctured semicircle."""
    x = grid.x_samples if x_dependent else np.zeros(1)
    phi = np.array([1.0, -1.0])
    rho = np.linspace(cc.rho_min, np.pi / 2, n_rho)
    return x, phi, rho


def principal_minimum(principal, x_dependent, strip, grid):
    """Smallest singular value of the principal symbol on the cosphere grid,
    polished by a local search, and the point where it is attained."""
    x, phi, rho = cosphere_samples(x_dependent, grid)
    thetas = np.asarray(strip.theta_samples)
    X, PHI, RHO, THETA = np.meshgrid(x, phi, rho, thetas, indexing="ij")
    values = principal(X, PHI * np.sin(RHO), np.cos(RHO), THETA)
    sv = smallest_singular_values(values)
    idx = np.unravel_index(np.argmin(sv), sv.shape)
    start = [X[idx], RHO[idx], THETA[idx]]
    sign = PHI[idx]

    def objective(p):
        v = principal(p[0], sign * np.sin(p[1]), np.cos(p[1]), p[2])
        return float(smallest_singular_values(v))

    point, value = refine_minimum(
        objective,
        start,
        [
            (start[0], start[0]),
            (cc.rho_min, np.pi / 2),
            (strip.theta_min, strip.theta_max),
        ],
    )
    witness = {
        "x": float(point[0]),
        "phi": float(sign),
        "rho": float(point[1]),
        "theta": float(point[2]),
        "xi": float(sign * np.sin(point[1])),
        "tau": float(np.cos(point[1])),
        "value": value,
    }
    return value, witness


def angular_minimum(angular, x_dependent, strip, grid):
    x, phi, _ = cosphere_samples(x_dependent, grid)
    thetas = np.asarray(strip.theta_samples)
    X, PHI, THETA = np.meshgrid(x, phi, thetas, indexing="ij")
    sv = smallest_singular_values(angular(X, PHI, THETA))
    idx = np.unravel_index(np.argmin(sv), sv.shape)
    witness = {
        "x": float(X[idx]),
        "phi": float(PHI[idx]),
        "theta": float(THETA[idx]),
        "value": float(sv[idx]),
    }
    return float(sv[idx]), witness


def check_refined(
    a: SymbolExpr, strip: ParameterStrip, grid: Optional[CircleGrid] = None
) -> EllipticityReport:
    """Test invertibility of the principal, angular and limit data of ``a``.

    Raises
    ------
    NoPrincipalData
        If ``a`` lacks a principal or an angular symbol.
    NotInCalculus
        If ``a`` has no structural limit-family.

    Examples
    --------
    >>> from skpsi.core import ParameterStrip
    >>> from skpsi.symbols import identity
    >>> strip = ParameterStrip.log_spaced(np.pi / 2, np.pi, 0, 1, 2)
    >>> check_refined(identity(), strip, CircleGrid(4)).passed
    True
    """
    grid = grid or CircleGrid(cc.K_test)
    threshold = cc.invertibility_threshold
    principal = a.require_principal()
    angular = angular_symbol(a)
    limit = a.limit

    x_dependent = a.x_dependent
    p_value, p_witness = principal_minimum(principal, x_dependent, strip, grid)
    a_value, a_witness = angular_minimum(angular, x_dependent, strip, grid)
    certificate = sigma3_certificate(
        lambda theta, K: limit_matrix(limit, theta, K),
        strip.theta_samples,
        grid.K,
    )
    verdicts = {
        "S1-principal": p_value >= threshold,
        "S1-angular": a_value >= threshold,
        "S2-limit": certificate.passed,
    }
    constants = {
        "S1-principal": 1.0 / p_value if p_value > 0 else np.inf,
        "S1-angular": 1.0 / a_value if a_value > 0 else np.inf,
        "S2-limit": 1.0 / certificate.smallest_K
        if certificate.smallest_K > 0
        else np.inf,
    }
    witness = None
    if not verdicts["S1-principal"]:
        witness = dict(p_witness, condition="S1-principal")
    elif not verdicts["S1-angular"]:
        witness = dict(a_witness, condition="S1-angular")
    elif not verdicts["S2-limit"]:
        witness = {
            "condition": "S2-limit",
            "theta": certificate.theta,
            "value": certificate.smallest_K,
        }
    logger.debug("Refined ellipticity verdicts %s", verdicts)
    return EllipticityReport(
        "refined", verdicts, witness, constants, certificate
    )


def check_ellipticity(
    a: SymbolExpr,
    strip: ParameterStrip,
    grid: Optional[CircleGrid] = None,
    calculus: str = "refined",
) -> EllipticityReport:
    """Dispatch to :func:`check_refined` or :func:`check_rough`."""
    if calculus == "refined":
        return check_refined(a, strip, grid)
    if calculus == "rough":
        return check_rough(a, strip, grid)
    raise ValueError(
        f"Unknown calculus {calculus!r}; use 'rough' or 'refined'."
    )
