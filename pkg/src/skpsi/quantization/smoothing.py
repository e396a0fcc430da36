"""Smoothing families known only through their matrices."""

import logging
from typing import Mapping, Optional

import numpy as np
import pandas as pd
from scipy import linalg

from skpsi.config import calculus_config as cc
from skpsi.exceptions import LambdaMismatch, ShapeMismatch
from skpsi.quantization.operator import TruncatedOperator
from skpsi.symbols.base import SmoothingSymbol
from skpsi.utils.fitting import fit_loglog

logger = logging.getLogger(__name__)

__all__ = ["SmoothingKernel", "encode_smoothing"]

MAX_CERTIFICATE_POWER = 3


def _key(lam) -> tuple:
    return (round(float(lam[0]), 12), round(float(lam[1]), 12))


class SmoothingKernel:
    """A lambda-indexed family of truncated matrices with decay certificates.

    ``certificates[m]`` is the sup over the stored lambdas of
    <tau>^m ||matrix(lambda)||, for m = 0..3. The family is flagged
    ``vanishing_at_infinity`` when the m = 1 certificate is finite and the
    norms decrease along the upper half of the tau samples. Norms at or
    below ``noise_floor`` count as zero.
    """

    def __init__(self, family: Mapping, K: int, fiber_shape=(1, 1)):
        self.K = int(K)
        self.fiber_shape = tuple(fiber_shape)
        N1, N0 = self.fiber_shape
        expected = ((2 * self.K + 1) * N1, (2 * self.K + 1) * N0)
        self._matrices = {}
        for lam, matrix in family.items():
            matrix = np.asarray(matrix, dtype=complex)
            if matrix.shape != expected:
                raise ShapeMismatch(
                    f"Matrix at {lam} has shape {matrix.shape}, "
                    f"expected {expected}."
                )
            self._matrices[_key(lam)] = matrix
        self.norms = pd.DataFrame(
            [
                {
                    "tau": lam[0],
                    "theta": lam[1],
                    "norm": float(linalg.svdvals(m)[0]) if m.size else 0.0,
                }
                for lam, m in self._matrices.items()
            ],
            columns=["tau", "theta", "norm"],
        )
        self.certificates = {
            m: float(
                np.max(
                    (
                        (1.0 + self.norms.tau**2) ** (m / 2) * self.norms.norm
                    ).to_numpy(),
                    initial=0.0,
                )
            )
            for m in range(MAX_CERTIFICATE_POWER + 1)
        }
        self.vanishing_at_infinity = self._decays()
        logger.debug(
            "Smoothing kernel certificates %s, vanishing=%s",
            self.certificates,
            self.vanishing_at_infinity,
        )

    def _decays(self) -> bool:
        if not np.isfinite(self.certificates[1]):
            return False
        floor = cc.noise_floor
        per_tau = self.norms.groupby("tau").norm.max().sort_index()
        if per_tau.empty or per_tau.max() <= floor:
            return True
        tail = per_tau[per_tau.index > 0]
        tail = tail.iloc[len(tail) // 2 :]
        if len(tail) and (tail.iloc[-1] == 0 or (tail <= floor).all()):
            return True
        if len(tail) < 2 or (tail <= 0).any():
            return len(per_tau) > 1 and per_tau.iloc[-1] < per_tau.iloc[0]
        slope, _ = fit_loglog(tail.index, tail.values)
        return slope < 0

    @property
    def lambdas(self) -> list:
        return list(self._matrices)

    def matrix(self, lam) -> np.ndarray:
        try:
            return self._matrices[_key(lam)]
        except KeyError:
            raise LambdaMismatch(
                f"No smoothing matrix stored at lambda={lam}."
            ) from None

    def operator(self, lam, K: Optional[int] = None, sobolev_s: float = 0.0):
        if K is not None and K != self.K:
            raise ShapeMismatch(f"Kernel is stored at K={self.K}, not K={K}.")
        N1, N0 = self.fiber_shape
        return TruncatedOperator(
            self.matrix(lam), _key(lam), self.K, N0, N1, sobolev_s
        )

    def as_symbol(self, name: Optional[str] = None) -> SmoothingSymbol:
        """Re-embed the family into the calculus as a smoothing term."""
        return SmoothingSymbol(self, name=name or "smoothing")

    def __repr__(self):
        return (
            f"SmoothingKernel(K={self.K}, lambdas={len(self._matrices)}, "
            f"vanishing={self.vanishing_at_infinity})"
        )


def encode_smoothing(
    family: Mapping, K: Optional[int] = None, fiber_shape=None
) -> SmoothingKernel:
    """Wrap lambda-indexed matrices (or TruncatedOperators) as a kernel.

    Examples
    --------
    >>> kernel = encode_smoothing({(1.0, 0.0): np.zeros((3, 3))})
    >>> kernel.vanishing_at_infinity, kernel.K
    (True, 1)
    """
    family = dict(family)
    if not family:
        raise ShapeMismatch("A smoothing family needs at least one lambda.")
    first = next(iter(family.values()))
    if isinstance(first, TruncatedOperator):
        K = first.K
        fiber_shape = (first.N1, first.N0)
        family = {lam: op.matrix for lam, op in family.items()}
    fiber_shape = tuple(fiber_shape or (1, 1))
    if K is None:
        K = (np.shape(first)[0] // fiber_shape[0] - 1) // 2
    return SmoothingKernel(family, K, fiber_shape)
