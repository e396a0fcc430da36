"""Resolvents of Toeplitz operators P A P and their decay in |z|.

For a fixed symbol A of positive integer order mu the parameter-dependent
family tau^mu e^{i theta} - A is reduced to order zero by R = <xi, tau>^-mu
and inverted on range(P) with the Toeplitz machinery. The inverse norms
over the sector z = tau^mu e^{i theta} then decay like |z|^-1.
"""

import logging
from dataclasses import dataclass, field
from numbers import Integral, Real
from typing import Optional

import numpy as np
import pandas as pd
from scipy import linalg
from sklearn.utils._param_validation import Interval

from skpsi.base import BaseCertifier
from skpsi.config import calculus_config as cc
from skpsi.core.grid import CircleGrid
from skpsi.core.seminorm import SeminormSpec, estimate_seminorm
from skpsi.core.strip import ParameterStrip
from skpsi.ellipticity.report import EllipticityReport
from skpsi.exceptions import ConfigInvalid, SpectralHypothesisFailed
from skpsi.quantization import quantize, sobolev_opnorm
from skpsi.symbols.base import Sum, SymbolExpr
from skpsi.symbols.catalog import parameter_monomial
from skpsi.toeplitz.compression import (
    ToeplitzParametrixResult,
    _compressed_smallest,
    toeplitz_ellipticity,
    toeplitz_parametrix,
)
from skpsi.toeplitz.projections import (
    OrderReductionPair,
    ProjectionSymbol,
    make_identity_projection,
)
from skpsi.utils.fitting import fit_loglog

logger = logging.getLogger(__name__)

__all__ = [
    "ResolventRecord",
    "ResolventEstimator",
    "resolvent_family",
    "resolvent_pipeline",
    "remark_identity_check",
    "spectral_equivalence_check",
]

MIXED_ORDERS = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


@dataclass
class ResolventRecord:
    """Inverse norms of z - A_P over the sector and their fitted decay.

    ``table`` has columns tau, theta, z_real, z_imag, inverse_norm,
    residual_left, residual_right, oracle_gap and domain_gain; ``slopes``
    has one fitted line (slope, C_fit) per theta ray.
    """

    table: pd.DataFrame
    slopes: pd.DataFrame
    fitted_slope: float
    C_fit: float
    domain_gain: float
    tau_threshold: float
    mixed_seminorms: dict
    parametrix: ToeplitzParametrixResult = field(repr=False)

    @property
    def decades(self) -> float:
        """Decades of |z| covered by the table."""
        modulus = _modulus(self.table)
        modulus = modulus[modulus > 0]
        if len(modulus) < 2:
            return 0.0
        return float(np.log10(modulus.max() / modulus.min()))


def resolvent_family(A: SymbolExpr, mu: Optional[float] = None) -> SymbolExpr:
    """tau^mu e^{i theta} - A.

    Raises
    ------
    ConfigInvalid
        If ``mu`` is not a positive integer.

    Examples
    --------
    >>> from skpsi.symbols import get_symbol
    >>> family = resolvent_family(get_symbol("bessel1"))
    >>> value = family.evaluate(0.0, 0.0, 2.0, np.pi).item()
    >>> round(value.real, 12), round(value.imag, 12)
    (-3.0, 0.0)
    """
    mu = A.order if mu is None else float(mu)
    if mu <= 0 or mu != int(mu):
        raise ConfigInvalid(
            f"Resolvent order must be a positive integer, got {mu}."
        )
    n = A.shape[0]
    name = f"z-{A.name or A.kind}"
    return Sum([parameter_monomial(mu, n), A], [1.0, -1.0], name=name)


def _modulus(table: pd.DataFrame) -> np.ndarray:
    return np.hypot(table.z_real.to_numpy(), table.z_imag.to_numpy())


def _fit_rays(table: pd.DataFrame, tau_min: float) -> pd.DataFrame:
    """One log-log line of inverse norm against |z| per theta ray."""
    rows = []
    for theta, ray in table[table.tau >= tau_min].groupby("theta"):
        modulus = _modulus(ray)
        keep = (modulus > 0) & (ray.inverse_norm.to_numpy() > 0)
        if keep.sum() < 2:
            continue
        slope, intercept = fit_loglog(
            modulus[keep], ray.inverse_norm.to_numpy()[keep]
        )
        C_fit = float(np.exp(intercept))
        rows.append({"theta": theta, "slope": slope, "C_fit": C_fit})
    return pd.DataFrame(rows, columns=["theta", "slope", "C_fit"])


def resolvent_pipeline(
    A: SymbolExpr,
    P: ProjectionSymbol,
    strip: ParameterStrip,
    grid: Optional[CircleGrid] = None,
    mu: Optional[float] = None,
    sobolev_s: float = 0.0,
    L: Optional[int] = None,
    n_jobs: Optional[int] = None,
) -> ResolventRecord:
    """Measure ||(z - A_P)^-1|| on range(P) over the sector of ``strip``.

    The spectral hypothesis is the Toeplitz ellipticity of
    P (tau^mu e^{i theta} - A) P. Inverse norms are fitted against
    |z| = tau^mu on every theta ray from tau_0 on, and ``domain_gain`` is
    the largest H^s -> H^{s + mu} norm of the inverse.

    Raises
    ------
    SpectralHypothesisFailed
        If the compressed principal symbol of z - A has spectrum in the
        sector; the witness names the direction.
    """
    grid = grid or CircleGrid(cc.K_test)
    family = resolvent_family(A, mu)
    mu = family.order
    RS = OrderReductionPair(mu, n=A.shape[0])
    report = toeplitz_ellipticity(family, P, P, strip, grid, RS)
    if not report.passed:
        witness = dict(report.witness or {})
        if "theta" in witness:
            witness["z_direction"] = complex(np.exp(1j * witness["theta"]))
        raise SpectralHypothesisFailed(
            f"P(z - A)P is not invertible on the sector: "
            f"{report.failed_conditions} fail.",
            witness=witness,
        )
    result = toeplitz_parametrix(
        family,
        P,
        P,
        strip,
        grid,
        RS,
        L=L,
        sobolev_s=sobolev_s,
        n_jobs=n_jobs,
        report=report,
    )
    table = result.residuals.copy()
    tau, theta = table.tau.to_numpy(), table.theta.to_numpy()
    z = tau**mu * np.exp(1j * theta)
    table.insert(2, "z_real", z.real)
    table.insert(3, "z_imag", z.imag)
    table["domain_gain"] = [
        sobolev_opnorm(result.inverses[lam], sobolev_s, sobolev_s + mu)
        for lam in zip(table.tau, table.theta)
    ]

    slopes = _fit_rays(table, max(result.tau_threshold, 0.0))
    fitted = float(slopes.slope.max()) if len(slopes) else np.nan
    C_fit = float(slopes.C_fit.max()) if len(slopes) else np.nan
    past = table[table.tau >= result.tau_threshold]
    gain = float(past.domain_gain.max()) if len(past) else np.nan

    reduced = RS.apply_reduction(A)
    mixed = {
        f"alpha={alpha},k={k}": estimate_seminorm(
            reduced,
            SeminormSpec(alpha=alpha, k=k, mu=mu, gamma=-mu),
            strip,
            grid,
        )
        for alpha, k in MIXED_ORDERS
    }
    logger.info("Resolvent decay slope %.3f, C_fit %.3g", fitted, C_fit)
    return ResolventRecord(
        table=table,
        slopes=slopes,
        fitted_slope=fitted,
        C_fit=C_fit,
        domain_gain=gain,
        tau_threshold=result.tau_threshold,
        mixed_seminorms=mixed,
        parametrix=result,
    )


def spectral_equivalence_check(
    A: SymbolExpr,
    B: SymbolExpr,
    P: ProjectionSymbol,
    strip: ParameterStrip,
    mu: Optional[float] = None,
    n_rho: int = 32,
) -> dict:
    """Compare the split and the joint spectral conditions on the cosphere.

    With C = P A P + (1 - P) B (1 - P), the compressed conditions for
    (A, P) and (B, 1 - P) hold at a point exactly when tau^mu e^{i theta}
    - C is invertible there.
    """
    mu = A.order if mu is None else float(mu)
    Q = P.complement()
    x = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    if not (A.x_dependent or B.x_dependent or P.symbol.x_dependent):
        x = x[:1]
    rho = np.linspace(cc.rho_min, np.pi / 2, n_rho)
    X, PHI, RHO, THETA = np.meshgrid(
        x, [1.0, -1.0], rho, strip.theta_samples, indexing="ij"
    )
    xi, tau = PHI * np.sin(RHO), np.cos(RHO)
    z = (tau**mu * np.exp(1j * THETA))[..., None, None]
    eye = np.eye(A.shape[0])
    p = P.symbol.require_principal()(X, xi, tau, THETA)
    q = Q.symbol.require_principal()(X, xi, tau, THETA)
    a = A.require_principal()(X, xi, tau, THETA)
    b = B.require_principal()(X, xi, tau, THETA)

    split_a, _, _ = _compressed_smallest(p, z * eye - a, p)
    split_b, _, _ = _compressed_smallest(q, z * eye - b, q)
    c = p @ a @ p + q @ b @ q
    joint = np.linalg.svd(z * eye - c, compute_uv=False)[..., -1]
    threshold = cc.invertibility_threshold
    split = (split_a >= threshold) & (split_b >= threshold)
    agree = split == (joint >= threshold)
    return {
        "agree": bool(agree.all()),
        "split_pass": bool(split.all()),
        "joint_pass": bool((joint >= threshold).all()),
        "points": int(agree.size),
    }


def remark_identity_check(
    A: SymbolExpr,
    B: SymbolExpr,
    P: ProjectionSymbol,
    strip: ParameterStrip,
    grid: Optional[CircleGrid] = None,
    mu: Optional[float] = None,
) -> dict:
    """Verify P(z - A)P + (1-P)(z - B)(1-P) = z - C on the truncated space.

    Here z = tau^mu e^{i theta} and C = P A P + (1-P) B (1-P). For an
    exactly idempotent P the identity holds to rounding.

    Examples
    --------
    >>> from skpsi.symbols import get_symbol
    >>> from skpsi.toeplitz.projections import make_hardy_projection
    >>> A, B = get_symbol("bessel1"), -get_symbol("bessel1")
    >>> strip = ParameterStrip(np.pi, np.pi, [1.0, 10.0], [np.pi])
    >>> check = remark_identity_check(A, B, make_hardy_projection(4), strip,
    ...                               CircleGrid(4))
    >>> check["max_gap"] <= 1e-12
    True
    """
    grid = grid or CircleGrid(cc.K_test)
    mu = A.order if mu is None else float(mu)
    n = A.shape[0]
    size = (2 * grid.K + 1) * n
    one = np.eye(size)
    worst = 0.0
    for tau in strip.tau_samples:
        for theta in strip.theta_samples:
            lam = (float(tau), float(theta))
            z = tau**mu * np.exp(1j * theta) * one
            Pq = P.quantize(lam, grid).matrix
            Qq = one - Pq
            Aq = quantize(A, lam, grid).matrix
            Bq = quantize(B, lam, grid).matrix
            C = Pq @ Aq @ Pq + Qq @ Bq @ Qq
            left = Pq @ (z - Aq) @ Pq + Qq @ (z - Bq) @ Qq
            worst = max(worst, float(linalg.norm(left - (z - C), 2)))
    return {
        "max_gap": worst,
        "passed": worst <= 1e-12,
        "spectral": spectral_equivalence_check(A, B, P, strip, mu),
    }


class ResolventEstimator(BaseCertifier):
    """Resolvent decay estimator.

    Fits the decay of ||(z - P A P)^-1|| against |z| over a strip.

    Parameters
    ----------
    projection : ProjectionSymbol, default=None
        The projection P; ``None`` uses the identity.
    K : int, default=None
        Truncation cutoff; ``None`` uses ``K_test``.
    sobolev_s : float, default=0.0
        Sobolev index of the norms.
    depth : int, default=None
        Neumann depth of the Toeplitz parametrix.
    n_jobs : int, default=None
        Number of jobs for the per-lambda loop.

    Attributes
    ----------
    record_ : ResolventRecord
    slope_ : float
        The worst fitted slope over the theta rays.
    C_fit_ : float
    """

    _parameter_constraints = {
        "projection": [ProjectionSymbol, None],
        "K": [Interval(Integral, 1, None, closed="left"), None],
        "sobolev_s": [Interval(Real, None, None, closed="neither")],
        "depth": [Interval(Integral, 0, None, closed="left"), None],
        "n_jobs": [Integral, None],
    }

    def __init__(
        self,
        projection: ProjectionSymbol = None,
        K: int = None,
        sobolev_s: float = 0.0,
        depth: int = None,
        n_jobs: int = None,
    ):
        self.projection = projection
        self.K = K
        self.sobolev_s = sobolev_s
        self.depth = depth
        self.n_jobs = n_jobs

    def fit(self, A: SymbolExpr, strip: ParameterStrip):
        grid = self._validate_inputs(A, strip)
        P = self.projection or make_identity_projection(A.shape[0])
        self.record_ = resolvent_pipeline(
            A,
            P,
            strip,
            grid,
            sobolev_s=self.sobolev_s,
            L=self.depth,
            n_jobs=self.n_jobs,
        )
        self.slope_ = self.record_.fitted_slope
        self.C_fit_ = self.record_.C_fit
        return self

    def score(self, A=None, strip=None) -> float:
        """Negative distance of the fitted slope from -1."""
        return -abs(self.slope_ + 1.0)
