"""Truncated Fourier realizations of Op(a)(lambda) on the circle.

The truncated space is spanned by e^{ikx} with |k| <= K, each frequency
carrying a fiber of dimension N. Matrices are indexed frequency-major:
row ``(k' + K) * N1 + i`` and column ``(k + K) * N0 + j``.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import linalg

from skpsi.config import calculus_config as cc
from skpsi.core.grid import CircleGrid
from skpsi.exceptions import LambdaMismatch, ShapeMismatch, SingularToTolerance
from skpsi.symbols.base import LeibnizProduct, SmoothingSymbol, Sum, SymbolExpr
from skpsi.warnings import TruncationEdgeWarning

logger = logging.getLogger(__name__)

__all__ = [
    "TruncatedOperator",
    "ConditionReport",
    "quantize",
    "sobolev_opnorm",
    "oracle_compose",
    "oracle_invert",
    "interior_gap",
]


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """A block matrix on the truncated space together with its lambda."""

    matrix: np.ndarray
    lam: tuple
    K: int
    N0: int = 1
    N1: int = 1
    sobolev_s: float = 0.0

    def __post_init__(self):
        size = 2 * self.K + 1
        if self.matrix.shape != (size * self.N1, size * self.N0):
            raise ShapeMismatch(
                f"Matrix of shape {self.matrix.shape} does not fit K={self.K}, "
                f"fibers ({self.N1}, {self.N0})."
            )

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    @property
    def H(self) -> "TruncatedOperator":
        return self.replace(self.matrix.conj().T, N0=self.N1, N1=self.N0)

    def replace(self, matrix, **changes) -> "TruncatedOperator":
        params = dict(
            lam=self.lam,
            K=self.K,
            N0=self.N0,
            N1=self.N1,
            sobolev_s=self.sobolev_s,
        )
        params.update(changes)
        return TruncatedOperator(np.asarray(matrix, dtype=complex), **params)

    def __matmul__(self, other):
        return oracle_compose(self, other)

    def __add__(self, other):
        _check_compatible(self, other, inner=False)
        return self.replace(self.matrix + other.matrix)

    def __sub__(self, other):
        _check_compatible(self, other, inner=False)
        return self.replace(self.matrix - other.matrix)

    def _mask(self, fiber: int, low: float, high: float) -> np.ndarray:
        k = np.abs(np.repeat(self.frequencies, fiber))
        return (k >= low) & (k <= high)

    def band(
        self, low: float = 0.0, high: Optional[float] = None
    ) -> np.ndarray:
        """The submatrix with rows and columns in low <= |k| <= high."""
        high = self.K / 2 if high is None else high
        if high > self.K / 2:
            warnings.warn(
                f"Band up to {high} reaches past the interior band K/2 = "
                f"{self.K / 2}; truncation effects are not excluded.",
                category=TruncationEdgeWarning,
                stacklevel=2,
            )
        rows = self._mask(self.N1, low, high)
        cols = self._mask(self.N0, low, high)
        return self.matrix[np.ix_(rows, cols)]

    @classmethod
    def identity(cls, lam, K, N=1) -> "TruncatedOperator":
        return cls(np.eye((2 * K + 1) * N, dtype=complex), tuple(lam), K, N, N)


@dataclass(frozen=True)
class ConditionReport:
    smallest: float
    largest: float
    condition: float
    regularization: Optional[float] = None


def _check_compatible(A, B, inner=True):
    if not np.allclose(A.lam, B.lam, rtol=0, atol=1e-12):
        raise LambdaMismatch(f"Operators live at lambda {A.lam} and {B.lam}.")
    if A.K != B.K:
        raise ShapeMismatch(f"Cutoffs differ: K={A.K} and K={B.K}.")
    if inner and A.N0 != B.N1:
        raise ShapeMismatch(f"Cannot compose fibers {A.N0} and {B.N1}.")
    if not inner and (A.N0, A.N1) != (B.N0, B.N1):
        raise ShapeMismatch("Operators act between different fibers.")


def _contains_smoothing(a: SymbolExpr) -> bool:
    if isinstance(a, SmoothingSymbol):
        return True
    if isinstance(a, Sum):
        return any(_contains_smoothing(c) for c in a.children)
    if isinstance(a, LeibnizProduct):
        return _contains_smoothing(a.left) or _contains_smoothing(a.right)
    return False


def _as_grid(grid_or_K) -> CircleGrid:
    if isinstance(grid_or_K, CircleGrid):
        return grid_or_K
    return CircleGrid(int(grid_or_K))


def quantize(
    a: SymbolExpr, lam, grid: Union[CircleGrid, int], sobolev_s: float = 0.0
) -> TruncatedOperator:
    """Op(a)(lambda) on the frequencies -K..K.

    Block (k', k) is the (k' - k)-th Fourier coefficient in x of
    a(., k, lambda). Smoothing terms enter through their stored matrices
    and products containing them are composed as matrices.

    Raises
    ------
    NonEvaluable
        If ``a`` is undefined at an integer frequency.

    Examples
    --------
    >>> from skpsi.symbols import get_symbol
    >>> T = quantize(get_symbol("bessel1"), (1.0, 0.0), 2)
    >>> np.round(np.diag(T.matrix).real ** 2, 6)
    array([5., 2., 1., 2., 5.])
    """
    grid = _as_grid(grid)
    lam = (float(lam[0]), float(lam[1]))
    K = grid.K
    N1, N0 = a.shape
    if isinstance(a, SmoothingSymbol):
        return a.kernel.operator(lam, K, sobolev_s)
    if isinstance(a, Sum) and _contains_smoothing(a):
        total = np.zeros(((2 * K + 1) * N1, (2 * K + 1) * N0), dtype=complex)
        for c, child in zip(a.coefficients, a.children):
            total = total + c * quantize(child, lam, grid).matrix
        return TruncatedOperator(total, lam, K, N0, N1, sobolev_s)
    if isinstance(a, LeibnizProduct) and _contains_smoothing(a):
        left = quantize(a.left, lam, grid)
        right = quantize(a.right, lam, grid)
        product = oracle_compose(left, right)
        return product.replace(product.matrix, sobolev_s=sobolev_s)

    tau, theta = lam
    k = grid.frequencies
    if not a.x_dependent:
        values = a.evaluate(0.0, k, tau, theta)
        matrix = linalg.block_diag(*values)
        return TruncatedOperator(
            matrix.astype(complex), lam, K, N0, N1, sobolev_s
        )

    # every offset k' - k in [-2K, 2K] needs its own DFT bin
    n = max(grid.n_x, 4 * K + 2)
    x = 2 * np.pi * np.arange(n) / n
    values = a.evaluate(x[:, None], k[None, :], tau, theta)
    coefficients = np.fft.fft(values, axis=0) / n
    offsets = (k[:, None] - k[None, :]).astype(int) % n
    columns = np.broadcast_to(np.arange(k.size)[None, :], offsets.shape)
    blocks = coefficients[offsets, columns]
    matrix = blocks.transpose(0, 2, 1, 3).reshape(k.size * N1, k.size * N0)
    return TruncatedOperator(matrix, lam, K, N0, N1, sobolev_s)


def _sobolev_weights(K: int, fiber: int, r: float) -> np.ndarray:
    k = np.repeat(np.arange(-K, K + 1), fiber)
    return (1.0 + k**2) ** (r / 2)


def sobolev_opnorm(
    T: TruncatedOperator, s: float = 0.0, t: Optional[float] = None
) -> float:
    """Operator norm H^s -> H^t, the top singular value of D_t T D_s^-1.

    Examples
    --------
    >>> T = TruncatedOperator.identity((1.0, 0.0), 3)
    >>> round(sobolev_opnorm(T, 1.0, 1.0), 12)
    1.0
    """
    t = s if t is None else t
    left = _sobolev_weights(T.K, T.N1, t)
    right = _sobolev_weights(T.K, T.N0, -s)
    weighted = left[:, None] * T.matrix * right[None, :]
    return float(linalg.svdvals(weighted)[0])


def oracle_compose(
    A: TruncatedOperator, B: TruncatedOperator
) -> TruncatedOperator:
    """The matrix product A B.

    Raises
    ------
    ShapeMismatch
        If the cutoffs or inner fibers differ.
    LambdaMismatch
        If A and B are taken at different parameters.
    """
    _check_compatible(A, B)
    return A.replace(A.matrix @ B.matrix, N0=B.N0, N1=A.N1)


def oracle_invert(
    T: TruncatedOperator, regularize: Optional[float] = None
) -> tuple[TruncatedOperator, ConditionReport]:
    """Inverse of T, or the Tikhonov pseudo-inverse when ``regularize`` is an
    epsilon.

    Raises
    ------
    SingularToTolerance
        If the smallest singular value is below ``inversion_rtol`` times the
        largest and no regularization is requested.
    """
    if T.matrix.shape[0] != T.matrix.shape[1]:
        raise ShapeMismatch(f"Cannot invert a {T.matrix.shape} matrix.")
    sv = linalg.svdvals(T.matrix)
    largest, smallest = float(sv[0]), float(sv[-1])
    condition = largest / smallest if smallest > 0 else np.inf
    report = ConditionReport(smallest, largest, condition, regularize)
    if regularize is not None:
        M = T.matrix
        gram = M.conj().T @ M + regularize**2 * np.eye(M.shape[1])
        inverse = linalg.solve(gram, M.conj().T, assume_a="her")
    else:
        if smallest < cc.inversion_rtol * largest:
            raise SingularToTolerance(
                f"Smallest singular value {smallest:.3e} is below "
                f"{cc.inversion_rtol:g} x {largest:.3e}.",
                witness={
                    "lambda": T.lam,
                    "smallest": smallest,
                    "largest": largest,
                },
            )
        inverse = linalg.inv(T.matrix)
    logger.debug("Inverted operator at %s, condition %.3e", T.lam, condition)
    return T.replace(inverse, N0=T.N1, N1=T.N0), report


def interior_gap(
    A: TruncatedOperator, B: TruncatedOperator, low: float = 0.0, high=None
) -> float:
    """Spectral norm of A - B restricted to the band low <= |k| <= high."""
    _check_compatible(A, B, inner=False)
    block = (A - B).band(low, high)
    if block.size == 0:
        return 0.0
    return float(linalg.svdvals(block)[0])
