"""Parametrices that are exact inverses for large parameters.

The construction runs in three stages: a Neumann series on top of the
excised inverse, a correction that removes the limit-family of the
residual, and the inversion of 1 + r for the remaining smoothing family r.
"""

import logging
from numbers import Integral, Real
from typing import NamedTuple, Optional

import numpy as np
import pandas as pd
from scipy import linalg
from sklearn.utils._param_validation import Interval, StrOptions

from skpsi.base import BaseCertifier
from skpsi.config import calculus_config as cc
from skpsi.core.grid import CircleGrid
from skpsi.core.strip import ParameterStrip, sample_lambda
from skpsi.ellipticity.refined import check_ellipticity
from skpsi.ellipticity.report import ParametrixResult
from skpsi.exceptions import (
    DepthTooLarge,
    EllipticityFailed,
    NeverSmall,
    ShapeMismatch,
    SingularToTolerance,
)
from skpsi.quantization import (
    SmoothingKernel,
    TruncatedOperator,
    encode_smoothing,
    oracle_invert,
    quantize,
    sobolev_opnorm,
)
from skpsi.symbols.base import (
    ExcisedInverse,
    LeibnizProduct,
    Sum,
    SymbolExpr,
    identity,
)
from skpsi.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

__all__ = [
    "SmoothingInverse",
    "neumann_parametrix",
    "invert_one_plus_smoothing",
    "parametrix",
    "Parametrix",
]


def _leibniz_depth(N: int) -> int:
    return int(min(max(N, 0), cc.max_leibniz_order))


def neumann_parametrix(
    a: SymbolExpr, L: Optional[int] = None, radius: Optional[float] = None
) -> SymbolExpr:
    """b'' = b' + (a^inf)^-1 # (1 - a^inf # b'^inf) with b' = b0 # sum r^j.

    ``b0`` is the excised inverse of ``a`` and r = 1 - a # b0 has order
    -1. Each power r^j is composed with truncation L - j, so every
    neglected term has order at most -(L + 1).

    Raises
    ------
    DepthTooLarge
        If L exceeds ``max_neumann_depth``.
    NotInCalculus
        If ``a`` has no structural limit-family.

    Examples
    --------
    >>> from skpsi.symbols import constant
    >>> b = neumann_parametrix(constant(2.0), L=1)
    >>> [complex(b.evaluate(0.0, k, 1.0, 0.0).item()) for k in (0.0, 3.0)]
    [(0.5+0j), (0.5+0j)]
    """
    L = cc.neumann_depth if L is None else int(L)
    if not 0 <= L <= cc.max_neumann_depth:
        raise DepthTooLarge(
            f"Neumann depth L={L} outside 0..{cc.max_neumann_depth}."
        )
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"Cannot invert a {a.shape} symbol.")
    n = a.shape[0]
    radius = max(1.0, cc.ellipticity_C) if radius is None else float(radius)

    b0 = ExcisedInverse(a, excise=True, radius=radius, name="excised-inverse")
    r = Sum(
        [identity(n), LeibnizProduct(a, b0, _leibniz_depth(L))],
        [1.0, -1.0],
        order=-1.0,
        name="neumann-residual",
    )
    terms = [b0]
    power = r
    for j in range(1, L + 1):
        depth = _leibniz_depth(L - j)
        terms.append(LeibnizProduct(b0, power, depth))
        if j < L:
            power = LeibnizProduct(r, power, _leibniz_depth(L - j - 1))
    b_prime = Sum(terms, order=-a.order, name="neumann")

    limit = a.limit
    if limit.is_zero:
        return b_prime
    b_limit = b_prime.limit
    depth = _leibniz_depth(L)
    if b_limit.is_zero:
        residual = identity(n)
    else:
        residual = Sum(
            [identity(n), LeibnizProduct(limit.symbol, b_limit.symbol, depth)],
            [1.0, -1.0],
        )
    correction = LeibnizProduct(
        ExcisedInverse(limit.symbol, excise=False), residual, depth
    )
    logger.debug("Neumann parametrix of depth %d with limit correction", L)
    return Sum([b_prime, correction], order=-a.order, name="parametrix")


class SmoothingInverse(NamedTuple):
    """The tail s with (1 + r)(1 + s) = 1 for tau >= ``threshold``."""

    kernel: SmoothingKernel
    threshold: float
    threshold_per_theta: dict


def invert_one_plus_smoothing(
    r: SmoothingKernel, smallness: Optional[float] = None
) -> SmoothingInverse:
    """Invert 1 + r for a vanishing smoothing family r.

    The threshold C is the smallest grid tau beyond which
    ``||r(lambda)|| <= smallness`` at every theta. For tau >= C the tail is
    s = -r + r (1 + r)^-1 r, for tau < C only the term -r is kept.

    Raises
    ------
    NeverSmall
        If r does not vanish at infinity, or its norm never stays below
        ``smallness`` on the grid.

    Examples
    --------
    >>> zero = encode_smoothing({(1.0, 0.0): np.zeros((3, 3))})
    >>> inverse = invert_one_plus_smoothing(zero)
    >>> tail = inverse.kernel.matrix((1.0, 0.0))
    >>> inverse.threshold, float(np.abs(tail).max())
    (1.0, 0.0)
    """
    smallness = cc.smallness if smallness is None else smallness
    if not r.vanishing_at_infinity:
        raise NeverSmall("Smoothing family does not vanish as tau grows.")
    if r.fiber_shape[0] != r.fiber_shape[1]:
        raise ShapeMismatch(f"Cannot invert 1 + r for fibers {r.fiber_shape}.")

    per_theta = {}
    for theta, rows in r.norms.groupby("theta"):
        rows = rows.sort_values("tau")
        small = rows.norm.to_numpy() <= smallness
        # small from this tau onwards
        tail = np.logical_and.accumulate(small[::-1])[::-1]
        if not tail.any():
            raise NeverSmall(
                f"||r|| never stays below {smallness} at theta={theta:.4f}.",
                witness={"theta": float(theta), "norm": float(rows.norm.min())},
            )
        per_theta[float(theta)] = float(rows.tau.to_numpy()[np.argmax(tail)])
    threshold = max(per_theta.values())

    family = {}
    for lam in r.lambdas:
        m = r.matrix(lam)
        if lam[0] >= threshold:
            eye = np.eye(m.shape[0])
            family[lam] = -m + m @ linalg.solve(eye + m, m)
        else:
            family[lam] = -m
    logger.debug("1 + r invertible from tau=%g on", threshold)
    return SmoothingInverse(
        SmoothingKernel(family, r.K, r.fiber_shape), threshold, per_theta
    )


def _quantize_pair(a, b, grid, sobolev_s):
    def quantize_at(lam):
        A = quantize(a, lam, grid, sobolev_s)
        B = quantize(b, lam, grid, sobolev_s)
        return A, B

    return quantize_at


def _oracle_gap(A: TruncatedOperator, B: TruncatedOperator, s: float) -> float:
    try:
        inverse, _ = oracle_invert(A)
    except SingularToTolerance:
        return np.nan
    return sobolev_opnorm(B - inverse, s)


def parametrix(
    a: SymbolExpr,
    strip: ParameterStrip,
    grid: Optional[CircleGrid] = None,
    L: Optional[int] = None,
    calculus: str = "refined",
    sobolev_s: float = 0.0,
    n_jobs: Optional[int] = None,
) -> ParametrixResult:
    """The full parametrix of ``a`` with its smoothing tail.

    The ellipticity report is checked first; the Neumann parametrix b is
    quantized at every grid lambda and the residual r = Op(b)Op(a) - 1 is
    inverted as a smoothing family. Past the threshold tau_0 the operator
    (1 + s) Op(b) is the exact inverse of Op(a) on the truncated space.

    Raises
    ------
    EllipticityFailed
        If the ellipticity report fails; the report is attached.
    NeverSmall
        If the residual does not become small on the strip.
    """
    grid = grid or CircleGrid(cc.K_test)
    report = check_ellipticity(a, strip, grid, calculus)
    if not report.passed:
        raise EllipticityFailed(
            f"{a!r} is not parameter-elliptic on the strip: "
            f"{report.failed_conditions} fail.",
            report=report,
        )
    L = cc.neumann_depth if L is None else L
    b = neumann_parametrix(a, L)
    lambdas = sample_lambda(strip)
    logger.debug(
        "Quantizing parametrix at %d lambdas, K=%d", len(lambdas), grid.K
    )
    pairs = parallel_map(_quantize_pair(a, b, grid, sobolev_s), lambdas, n_jobs)

    n = a.shape[1]
    residuals = {}
    for A, B in pairs:
        one = TruncatedOperator.identity(A.lam, grid.K, n)
        residuals[A.lam] = (B @ A - one).matrix
    inverse = invert_one_plus_smoothing(
        encode_smoothing(residuals, grid.K, (n, n))
    )

    rows, tails, operators = [], {}, {}
    for A, B in pairs:
        s = inverse.kernel.matrix(A.lam)
        tails[A.lam] = s @ B.matrix
        total = B.replace(B.matrix + tails[A.lam])
        one = TruncatedOperator.identity(A.lam, grid.K, n)
        past = A.lam[0] >= inverse.threshold
        rows.append(
            {
                "tau": A.lam[0],
                "theta": A.lam[1],
                "residual_left": sobolev_opnorm(total @ A - one, sobolev_s),
                "residual_right": sobolev_opnorm(A @ total - one, sobolev_s),
                "oracle_gap": _oracle_gap(A, total, sobolev_s)
                if past
                else np.nan,
            }
        )
        operators[A.lam] = total
    table = pd.DataFrame(
        rows,
        columns=[
            "tau",
            "theta",
            "residual_left",
            "residual_right",
            "oracle_gap",
        ],
    )
    logger.info(
        "Parametrix of %r exact from tau_0=%g on", a, inverse.threshold
    )
    return ParametrixResult(
        symbol=b,
        neumann_depth=L,
        tau_threshold=inverse.threshold,
        tau_threshold_per_theta=inverse.threshold_per_theta,
        residuals=table,
        tail=encode_smoothing(tails, grid.K, (n, n)),
        report=report,
        operators=operators,
    )


class Parametrix(BaseCertifier):
    """Parametrix estimator.

    Wraps :func:`parametrix` in the scikit-learn estimator interface so
    that pipelines can be configured, cloned and grid-searched.

    Parameters
    ----------
    depth : int, default=None
        Neumann depth L; ``None`` uses the configured default.
    calculus : {"refined", "rough"}, default="refined"
        Which ellipticity conditions are checked before the construction.
    K : int, default=None
        Truncation cutoff; ``None`` uses ``K_test``.
    sobolev_s : float, default=0.0
        Sobolev index of the residual norms.
    n_jobs : int, default=None
        Number of jobs for the per-lambda loop.

    Attributes
    ----------
    result_ : ParametrixResult
        The full construction.
    tau_threshold_ : float
        The uniform threshold tau_0.
    residuals_ : DataFrame
        The residual table.

    Examples
    --------
    >>> from skpsi.core import ParameterStrip
    >>> from skpsi.symbols import identity
    >>> strip = ParameterStrip.log_spaced(np.pi / 2, np.pi, 0, 1, 2, n_theta=2)
    >>> est = Parametrix(K=4).fit(identity(), strip)
    >>> est.tau_threshold_
    1.0
    """

    _parameter_constraints = {
        "depth": [Interval(Integral, 0, None, closed="left"), None],
        "calculus": [StrOptions({"refined", "rough"})],
        "K": [Interval(Integral, 1, None, closed="left"), None],
        "sobolev_s": [Interval(Real, None, None, closed="neither")],
        "n_jobs": [Integral, None],
    }

    def __init__(
        self,
        depth: int = None,
        calculus: str = "refined",
        K: int = None,
        sobolev_s: float = 0.0,
        n_jobs: int = None,
    ):
        self.depth = depth
        self.calculus = calculus
        self.K = K
        self.sobolev_s = sobolev_s
        self.n_jobs = n_jobs

    def fit(self, a: SymbolExpr, strip: ParameterStrip):
        """Construct the parametrix of ``a`` on ``strip``.

        Returns
        -------
        self : Parametrix
            Fitted estimator.
        """
        grid = self._validate_inputs(a, strip)
        self.result_ = parametrix(
            a,
            strip,
            grid,
            L=self.depth,
            calculus=self.calculus,
            sobolev_s=self.sobolev_s,
            n_jobs=self.n_jobs,
        )
        self.tau_threshold_ = self.result_.tau_threshold
        self.residuals_ = self.result_.residuals
        return self

    def inverse(self, lam) -> TruncatedOperator:
        """The quantized parametrix plus tail at a fitted grid lambda."""
        return self.result_.operators[(float(lam[0]), float(lam[1]))]
