"""Toeplitz operators P1 A P0 between ranges of projections.

Compressions act between range bases of the quantized projections. The
bases are orthonormal columns from a QR factorization with column
pivoting, so the compressed matrices realize the operators on the ranges
isometrically.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from scipy import linalg

from skpsi.config import calculus_config as cc
from skpsi.core.grid import CircleGrid
from skpsi.core.strip import ParameterStrip, sample_lambda
from skpsi.ellipticity.parametrix import (
    invert_one_plus_smoothing,
    neumann_parametrix,
)
from skpsi.ellipticity.refined import cosphere_samples
from skpsi.ellipticity.report import EllipticityReport, sigma3_certificate
from skpsi.ellipticity.rough import limit_matrix
from skpsi.ellipticity.search import refine_minimum
from skpsi.exceptions import EllipticityFailed, RankMismatch, ShapeMismatch
from skpsi.quantization import (
    TruncatedOperator,
    encode_smoothing,
    quantize,
    sobolev_opnorm,
)
from skpsi.symbols.base import LeibnizProduct, Sum, SymbolExpr, identity
from skpsi.symbols.taylor import angular_symbol
from skpsi.toeplitz.projections import (
    OrderReductionPair,
    ProjectionSymbol,
    tilde_conjugate,
)
from skpsi.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

__all__ = [
    "ToeplitzOperator",
    "ToeplitzParametrixResult",
    "extended_symbol",
    "range_basis",
    "orthonormality",
    "toeplitz_ellipticity",
    "toeplitz_parametrix",
]

RANK_TOL = 1e-8


def range_basis(matrix: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """Orthonormal basis of the column space of ``matrix``.

    Columns whose pivot falls below ``tol`` times the largest pivot are
    dropped.

    Examples
    --------
    >>> range_basis(np.diag([1.0, 0.0, 1.0])).shape
    (3, 2)
    """
    tol = cc.pivot_tol if tol is None else tol
    Q, R, _ = linalg.qr(matrix, mode="economic", pivoting=True)
    pivots = np.abs(np.diag(R))
    if pivots.size == 0 or pivots[0] == 0:
        return Q[:, :0]
    rank = int(np.sum(pivots > tol * pivots[0]))
    return Q[:, :rank]


def orthonormality(V: np.ndarray) -> float:
    """Spectral norm of I - V* V."""
    if V.shape[1] == 0:
        return 0.0
    return float(linalg.norm(np.eye(V.shape[1]) - V.conj().T @ V, 2))


def _conj_t(m):
    return np.conj(np.swapaxes(m, -1, -2))


def _compressed_smallest(p1, a, p0):
    """Smallest singular value of the compression of ``p1 a p0`` to the
    ranges of ``p0`` and ``p1``, pointwise over a stack of matrices.

    Points where both ranges are trivial get ``inf``. The ranks are
    returned alongside.
    """
    p1, a, p0 = np.broadcast_arrays(p1, a, p0)
    shape = p0.shape[:-2]
    p1 = p1.reshape(-1, *p1.shape[-2:])
    a = a.reshape(-1, *a.shape[-2:])
    p0 = p0.reshape(-1, *p0.shape[-2:])
    U1, s1, _ = np.linalg.svd(p1)
    U0, s0, _ = np.linalg.svd(p0)
    r1 = np.sum(s1 > RANK_TOL, axis=-1)
    r0 = np.sum(s0 > RANK_TOL, axis=-1)
    core = p1 @ a @ p0
    smallest = np.full(len(p0), np.inf)
    for r in np.unique(r0):
        idx = (r0 == r) & (r1 == r)
        if r == 0 or not idx.any():
            continue
        C = _conj_t(U1[idx][..., :r]) @ core[idx] @ U0[idx][..., :r]
        smallest[idx] = np.linalg.svd(C, compute_uv=False)[..., -1]
    return smallest.reshape(shape), r0.reshape(shape), r1.reshape(shape)


def _check_ranks(r0, r1, coords: dict, label: str):
    bad = np.argwhere(r0 != r1)
    if bad.size:
        idx = tuple(bad[0])
        witness = {k: float(v[idx]) for k, v in coords.items()}
        raise RankMismatch(
            f"{label}: range ranks {int(r0[idx])} and {int(r1[idx])} differ "
            f"at {witness}.",
            witness=witness,
        )


@dataclass(eq=False)
class ToeplitzOperator:
    """The compression P1 Op(A) P0 and its truncated realizations.

    ``compressed`` caches, per lambda, the matrix of P1 A P0 between the
    orthonormal range bases of P0 and P1.
    """

    A: SymbolExpr
    P0: ProjectionSymbol
    P1: ProjectionSymbol
    compressed: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        rows, cols = self.A.shape
        if self.P1.shape[1] != rows or cols != self.P0.shape[0]:
            raise ShapeMismatch(
                f"Cannot compress a {self.A.shape} symbol between projections "
                f"of shapes {self.P1.shape} and {self.P0.shape}."
            )

    def full(self, lam, grid) -> TruncatedOperator:
        """P1 A P0 on the whole truncated space."""
        P0 = self.P0.quantize(lam, grid)
        P1 = self.P1.quantize(lam, grid)
        return P1 @ quantize(self.A, lam, grid) @ P0

    def bases(self, lam, grid) -> tuple:
        Q0 = range_basis(self.P0.quantize(lam, grid).matrix)
        Q1 = range_basis(self.P1.quantize(lam, grid).matrix)
        return Q0, Q1

    def compress(self, lam, grid) -> np.ndarray:
        """The matrix Q1* P1 A P0 Q0.

        Raises
        ------
        RankMismatch
            If the truncated ranges of P0 and P1 have different dimensions.
        """
        Q0, Q1 = self.bases(lam, grid)
        if Q0.shape[1] != Q1.shape[1]:
            raise RankMismatch(
                f"Truncated ranges have dimensions {Q0.shape[1]} and "
                f"{Q1.shape[1]} at lambda={lam}.",
                witness={"tau": float(lam[0]), "theta": float(lam[1])},
            )
        C = Q1.conj().T @ self.full(lam, grid).matrix @ Q0
        self.compressed[(float(lam[0]), float(lam[1]))] = C
        return C


def _x_dependent(a, P0, P1) -> bool:
    return a.x_dependent or P0.symbol.x_dependent or P1.symbol.x_dependent


def _condition_principal(a, P0, P1, strip, grid):
    x_dependent = _x_dependent(a, P0, P1)
    x, phi, rho = cosphere_samples(x_dependent, grid)
    thetas = np.asarray(strip.theta_samples)
    X, PHI, RHO, THETA = np.meshgrid(x, phi, rho, thetas, indexing="ij")
    sa = a.require_principal()
    s0, s1 = P0.symbol.require_principal(), P1.symbol.require_principal()

    def fields(x, phi, rho, theta):
        xi, tau = phi * np.sin(rho), np.cos(rho)
        return tuple(s(x, xi, tau, theta) for s in (s1, sa, s0))

    smallest, r0, r1 = _compressed_smallest(*fields(X, PHI, RHO, THETA))
    coords = {"x": X, "phi": PHI, "rho": RHO, "theta": THETA}
    _check_ranks(r0, r1, coords, "Compressed principal symbol")
    idx = np.unravel_index(np.argmin(smallest), smallest.shape)
    if not np.isfinite(smallest[idx]):
        return np.inf, None
    sign = PHI[idx]

    def objective(p):
        value, q0, q1 = _compressed_smallest(*fields(p[0], sign, p[1], p[2]))
        return float(value) if q0 == q1 else np.inf

    start = [X[idx], RHO[idx], THETA[idx]]
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
        "condition": "1-principal",
        "x": float(point[0]),
        "phi": float(sign),
        "rho": float(point[1]),
        "theta": float(point[2]),
        "xi": float(sign * np.sin(point[1])),
        "tau": float(np.cos(point[1])),
        "value": value,
    }
    return value, witness


def _condition_angular(a, P0, P1, strip, grid):
    x_dependent = _x_dependent(a, P0, P1)
    x, phi, _ = cosphere_samples(x_dependent, grid)
    X, PHI, THETA = np.meshgrid(x, phi, strip.theta_samples, indexing="ij")
    sa, s0, s1 = angular_symbol(a), angular_symbol(P0.symbol), angular_symbol(
        P1.symbol
    )
    smallest, r0, r1 = _compressed_smallest(
        s1(X, PHI, THETA), sa(X, PHI, THETA), s0(X, PHI, THETA)
    )
    _check_ranks(r0, r1, {"x": X, "phi": PHI, "theta": THETA}, "Angular symbol")
    idx = np.unravel_index(np.argmin(smallest), smallest.shape)
    witness = {
        "condition": "2-angular",
        "x": float(X[idx]),
        "phi": float(PHI[idx]),
        "theta": float(THETA[idx]),
        "value": float(smallest[idx]),
    }
    return float(smallest[idx]), witness


def _compressed_limit(a, P0, P1):
    limits = a.limit, P0.symbol.limit, P1.symbol.limit

    def matrix_at(theta, K):
        L, Q0m, Q1m = (limit_matrix(lim, theta, K) for lim in limits)
        Q0, Q1 = range_basis(Q0m), range_basis(Q1m)
        if Q0.shape[1] != Q1.shape[1]:
            raise RankMismatch(
                f"Limit projections have ranks {Q0.shape[1]} and {Q1.shape[1]} "
                f"at theta={theta:.4f}.",
                witness={"theta": float(theta)},
            )
        return Q1.conj().T @ Q1m @ L @ Q0m @ Q0

    return matrix_at


def toeplitz_ellipticity(
    A: SymbolExpr,
    P0: ProjectionSymbol,
    P1: ProjectionSymbol,
    strip: ParameterStrip,
    grid: Optional[CircleGrid] = None,
    RS: Optional[OrderReductionPair] = None,
) -> EllipticityReport:
    """Ellipticity of the Toeplitz operator P1 A P0.

    After the order reduction R # A three conditions are tested: the
    compressed principal symbol on the pole-punctured cosphere ("1"), the
    compressed angular symbol at the pole ("2") and the compressed
    quantized limit-family with the doubling certificate ("3").

    Raises
    ------
    RankMismatch
        If the ranges of P0 and P1 differ in rank at some sample point.
    NoPrincipalData
        If A or a projection lacks principal data.

    Examples
    --------
    >>> from skpsi.symbols import identity
    >>> from skpsi.toeplitz.projections import make_hardy_projection
    >>> P = make_hardy_projection(4)
    >>> strip = ParameterStrip.log_spaced(0.0, np.pi, 0, 1, 2, n_theta=3)
    >>> toeplitz_ellipticity(identity(), P, P, strip, CircleGrid(4)).passed
    True
    """
    grid = grid or CircleGrid(cc.K_test)
    RS = RS or OrderReductionPair(A.order, n=A.shape[0])
    a = RS.apply_reduction(A)
    threshold = cc.invertibility_threshold

    p_value, p_witness = _condition_principal(a, P0, P1, strip, grid)
    g_value, g_witness = _condition_angular(a, P0, P1, strip, grid)
    certificate = sigma3_certificate(
        _compressed_limit(a, P0, P1), strip.theta_samples, grid.K
    )
    verdicts = {
        "1-principal": p_value >= threshold,
        "2-angular": g_value >= threshold,
        "3-limit": certificate.passed,
    }
    constants = {
        "1-principal": 1.0 / p_value if p_value > 0 else np.inf,
        "2-angular": 1.0 / g_value if g_value > 0 else np.inf,
        "3-limit": 1.0 / certificate.smallest_K
        if certificate.smallest_K > 0
        else np.inf,
    }
    witness = None
    if not verdicts["1-principal"]:
        witness = p_witness
    elif not verdicts["2-angular"]:
        witness = g_witness
    elif not verdicts["3-limit"]:
        witness = {
            "condition": "3-limit",
            "theta": certificate.theta,
            "value": certificate.smallest_K,
        }
    logger.debug("Toeplitz ellipticity verdicts %s", verdicts)
    return EllipticityReport(
        "toeplitz", verdicts, witness, constants, certificate
    )


@dataclass
class ToeplitzParametrixResult:
    """The inverse P0 B R P1 (plus tail) of a Toeplitz operator.

    ``residuals`` has columns tau, theta, inverse_norm, residual_left,
    residual_right and oracle_gap; ``inverses`` maps each lambda to the
    truncated inverse on the whole space, vanishing off range(P1).
    """

    operator: ToeplitzOperator
    symbol: SymbolExpr
    reduction: OrderReductionPair
    tau_threshold: float
    tau_threshold_per_theta: dict
    residuals: pd.DataFrame
    chain_residual: float
    report: EllipticityReport
    inverses: dict = field(default_factory=dict, repr=False)

    def past_threshold(self) -> pd.DataFrame:
        return self.residuals[self.residuals.tau >= self.tau_threshold]

    def max_residual(self) -> float:
        rows = self.past_threshold()
        if rows.empty:
            return np.inf
        return float(rows[["residual_left", "residual_right"]].to_numpy().max())


def extended_symbol(
    a: SymbolExpr, P0: ProjectionSymbol, P1: ProjectionSymbol
) -> SymbolExpr:
    """P1 # a # P0 + (1 - P1) # (1 - P0), elliptic when the compression is."""
    n = a.shape[0]
    if a.shape != P0.shape or a.shape != P1.shape:
        raise ShapeMismatch(
            f"Extension needs equal square shapes, got {a.shape}, {P0.shape}, "
            f"{P1.shape}."
        )
    body = LeibnizProduct(LeibnizProduct(P1.symbol, a), P0.symbol)
    rest = LeibnizProduct(identity(n) - P1.symbol, identity(n) - P0.symbol)
    return Sum([body, rest], name="toeplitz-extension")


def toeplitz_parametrix(
    A: SymbolExpr,
    P0: ProjectionSymbol,
    P1: ProjectionSymbol,
    strip: ParameterStrip,
    grid: Optional[CircleGrid] = None,
    RS: Optional[OrderReductionPair] = None,
    L: Optional[int] = None,
    sobolev_s: float = 0.0,
    n_jobs: Optional[int] = None,
    report: Optional[EllipticityReport] = None,
) -> ToeplitzParametrixResult:
    """Inverse of P1 Op(A) P0 for large parameters.

    With A~ = R # A and P~1 = R # P1 # S, the symbol b is the Neumann
    parametrix of P~1 A~ P0 + (1 - P~1)(1 - P0). The operator
    B' = P0 Op(b) R P1 is a left inverse modulo a smoothing family on
    range(P0), which is inverted exactly past the threshold tau_0. A
    precomputed ``report`` skips the ellipticity check.

    Raises
    ------
    EllipticityFailed
        If :func:`toeplitz_ellipticity` fails; the report is attached.
    """
    grid = grid or CircleGrid(cc.K_test)
    RS = RS or OrderReductionPair(A.order, n=A.shape[0])
    if report is None:
        report = toeplitz_ellipticity(A, P0, P1, strip, grid, RS)
    if not report.passed:
        raise EllipticityFailed(
            f"Toeplitz operator of {A!r} is not elliptic: "
            f"{report.failed_conditions} fail.",
            report=report,
        )
    operator = ToeplitzOperator(A, P0, P1)
    reduced = RS.apply_reduction(A)
    P1_tilde = tilde_conjugate(P1, RS)
    b = neumann_parametrix(extended_symbol(reduced, P0, P1_tilde), L)
    n = A.shape[0]

    def realize(lam):
        P0q = P0.quantize(lam, grid)
        P1q = P1.quantize(lam, grid)
        Rq = quantize(RS.R, lam, grid)
        compressed = P1q @ quantize(A, lam, grid) @ P0q
        approx = P0q @ quantize(b, lam, grid) @ Rq @ P1q
        Q0 = range_basis(P0q.matrix)
        Q1 = range_basis(P1q.matrix)
        chain = quantize(RS.S, lam, grid) @ P1_tilde.quantize(lam, grid) @ Rq
        return P0q, P1q, compressed, approx, Q0, Q1, chain

    lambdas = sample_lambda(strip)
    realized = parallel_map(realize, lambdas, n_jobs)

    residuals = {}
    for P0q, _, compressed, approx, Q0, _, _ in realized:
        if Q0.shape[1] == 0:
            residuals[P0q.lam] = np.zeros_like(P0q.matrix)
            continue
        M = Q0.conj().T @ (approx @ compressed).matrix @ Q0
        residuals[P0q.lam] = Q0 @ (M - np.eye(Q0.shape[1])) @ Q0.conj().T
    inverse = invert_one_plus_smoothing(
        encode_smoothing(residuals, grid.K, (n, n))
    )

    rows, inverses, chain_residual = [], {}, 0.0
    for P0q, P1q, compressed, approx, Q0, Q1, chain in realized:
        lam = P0q.lam
        s = inverse.kernel.matrix(lam)
        total = approx.replace(approx.matrix + s @ approx.matrix)
        gap = np.nan
        if lam[0] >= inverse.threshold and Q0.shape[1] == Q1.shape[1]:
            C = Q1.conj().T @ compressed.matrix @ Q0
            if Q0.shape[1]:
                direct = Q0 @ linalg.solve(C, Q1.conj().T)
                gap = sobolev_opnorm(
                    total.replace(total.matrix - direct), sobolev_s
                )
            else:
                gap = 0.0
        rows.append(
            {
                "tau": lam[0],
                "theta": lam[1],
                "inverse_norm": sobolev_opnorm(total, sobolev_s),
                "residual_left": sobolev_opnorm(
                    total @ compressed - P0q, sobolev_s
                ),
                "residual_right": sobolev_opnorm(
                    compressed @ total - P1q, sobolev_s
                ),
                "oracle_gap": gap,
            }
        )
        chain_residual = max(
            chain_residual, float(np.abs((chain - P1q).matrix).max(initial=0.0))
        )
        inverses[lam] = total
    table = pd.DataFrame(
        rows,
        columns=[
            "tau",
            "theta",
            "inverse_norm",
            "residual_left",
            "residual_right",
            "oracle_gap",
        ],
    )
    logger.info("Toeplitz inverse exact from tau_0=%g on", inverse.threshold)
    return ToeplitzParametrixResult(
        operator=operator,
        symbol=b,
        reduction=RS,
        tau_threshold=inverse.threshold,
        tau_threshold_per_theta=inverse.threshold_per_theta,
        residuals=table,
        chain_residual=chain_residual,
        report=report,
        inverses=inverses,
    )
