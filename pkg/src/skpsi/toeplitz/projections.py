"""Zero-order projections and the order reductions used to conjugate them."""

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import linalg

from skpsi.config import calculus_config as cc
from skpsi.core.grid import CircleGrid
from skpsi.core.strip import ParameterStrip
from skpsi.exceptions import ShapeMismatch
from skpsi.quantization import TruncatedOperator, quantize
from skpsi.symbols.base import LeibnizProduct, SymbolExpr, identity, zero
from skpsi.symbols.catalog import (
    bracket_power,
    hardy_symbol,
    rotated_projection,
)

logger = logging.getLogger(__name__)

__all__ = [
    "ProjectionSymbol",
    "OrderReductionPair",
    "make_hardy_projection",
    "make_rotated_projection",
    "make_identity_projection",
    "make_zero_projection",
    "tilde_conjugate",
]

RANK_RHOS = (cc.rho_min, np.pi / 4, np.pi / 2)


def _rank_profile(p: SymbolExpr, x: np.ndarray) -> dict:
    """Rank of the principal symbol on each half of the cosphere."""
    principal = p.require_principal()
    profile = {}
    for phi in (1.0, -1.0):
        rho = np.asarray(RANK_RHOS)
        values = principal(
            x[:, None], phi * np.sin(rho)[None, :], np.cos(rho)[None, :], 0.0
        )
        ranks = np.linalg.matrix_rank(values.reshape(-1, *p.shape), tol=1e-8)
        profile[phi] = int(np.max(ranks))
    return profile


@dataclass(frozen=True, eq=False)
class ProjectionSymbol:
    """An order-zero symbol whose operator is a projection.

    ``exact`` is set when the quantized matrix is exactly idempotent;
    otherwise idempotence holds up to a smoothing error that is measured
    by :meth:`idempotence_residual`.
    """

    symbol: SymbolExpr
    exact: bool = False
    rank_profile: dict = field(default=None)
    name: Optional[str] = None

    def __post_init__(self):
        if self.symbol.shape[0] != self.symbol.shape[1]:
            raise ShapeMismatch(
                f"A projection needs a square symbol, got {self.symbol.shape}."
            )
        if self.rank_profile is None:
            x = np.linspace(0, 2 * np.pi, 8, endpoint=False)
            if not self.symbol.x_dependent:
                x = x[:1]
            profile = _rank_profile(self.symbol, x)
            object.__setattr__(self, "rank_profile", profile)

    @property
    def shape(self) -> tuple:
        return self.symbol.shape

    def quantize(self, lam, grid: Union[CircleGrid, int]) -> TruncatedOperator:
        return quantize(self.symbol, lam, grid)

    def idempotence_residual(
        self, lam, grid: Union[CircleGrid, int], interior: bool = True
    ) -> float:
        """Spectral norm of P^2 - P, on the interior band when ``interior``."""
        P = self.quantize(lam, grid)
        gap = P @ P - P
        block = gap.band(0, P.K / 2) if interior else gap.matrix
        return float(linalg.svdvals(block)[0]) if block.size else 0.0

    def complement(self) -> "ProjectionSymbol":
        n = self.shape[0]
        rank = {phi: n - r for phi, r in self.rank_profile.items()}
        return ProjectionSymbol(
            identity(n) - self.symbol,
            exact=self.exact,
            rank_profile=rank,
            name=f"1-{self.name or 'P'}",
        )


def make_hardy_projection(K: Optional[int] = None) -> ProjectionSymbol:
    """The Szego projection onto nonnegative frequencies.

    Its symbol is a smooth step that equals 1 at every integer k >= 0 and
    0 at k < 0, so the quantized matrix is exactly diag(1_{k >= 0}).

    Examples
    --------
    >>> P = make_hardy_projection(3)
    >>> np.diag(P.quantize((1.0, 0.0), 3).matrix).real
    array([0., 0., 0., 1., 1., 1., 1.])
    >>> P.exact, P.rank_profile
    (True, {1.0: 1, -1.0: 0})
    """
    K = cc.K_test if K is None else K
    symbol = hardy_symbol()
    Q = quantize(symbol, (1.0, 0.0), K).matrix
    exact = bool(np.array_equal(Q @ Q, Q))
    return ProjectionSymbol(symbol, exact=exact, name="hardy")


def make_rotated_projection() -> ProjectionSymbol:
    """The rank-one field u(x) u(x)* in C^2, u(x) = (cos x/2, sin x/2)."""
    return ProjectionSymbol(rotated_projection(), exact=False, name="rotated")


def make_identity_projection(n: int = 1) -> ProjectionSymbol:
    return ProjectionSymbol(identity(n), exact=True, name="identity")


def make_zero_projection(n: int = 1) -> ProjectionSymbol:
    return ProjectionSymbol(zero((n, n)), exact=True, name="zero")


class OrderReductionPair:
    """The multiplier pair R = <xi, tau>^-mu, S = <xi, tau>^mu.

    Both are classical, theta-independent and x-independent, so R # S
    and S # R are exactly the identity.

    Parameters
    ----------
    mu : float
        The order that R removes and S restores.
    n : int, default=1
        Fiber dimension; the scalars act as multiples of the identity.
    """

    def __init__(self, mu: float, n: int = 1):
        self.mu = float(mu)
        self.n = int(n)
        self.R = bracket_power(-self.mu, n=self.n)
        self.S = bracket_power(self.mu, n=self.n)

    def __repr__(self):
        return f"OrderReductionPair(mu={self.mu:g}, n={self.n})"

    def apply_reduction(self, a: SymbolExpr) -> SymbolExpr:
        """R # a, of order ``a.order - mu``."""
        return LeibnizProduct(self.R, a, name=f"R#{a.name or a.kind}")

    def check_identity(
        self, strip: ParameterStrip, grid: Optional[CircleGrid] = None
    ) -> float:
        """max |R S - 1| and |S R - 1| over the strip and the frequencies."""
        grid = grid or CircleGrid(cc.K_test)
        k = grid.frequencies.astype(float)
        tau = strip.tau_samples
        eye = np.eye(self.n)
        worst = 0.0
        for theta in strip.theta_samples:
            R = self.R.evaluate(0.0, k[:, None], tau[None, :], theta)
            S = self.S.evaluate(0.0, k[:, None], tau[None, :], theta)
            worst = max(
                worst,
                float(np.abs(R @ S - eye).max()),
                float(np.abs(S @ R - eye).max()),
            )
        return worst


def tilde_conjugate(
    P: ProjectionSymbol, RS: OrderReductionPair
) -> ProjectionSymbol:
    """The conjugated projection R # P # S.

    For a multiplier P all three factors commute and the result is P again,
    exactness included; otherwise exactness is cleared and idempotence is
    only certified numerically.

    Raises
    ------
    ShapeMismatch
        If the fibers of P and the reduction pair differ.
    """
    if P.shape != (RS.n, RS.n):
        raise ShapeMismatch(
            f"Projection of shape {P.shape} cannot be conjugated by a pair "
            f"acting on C^{RS.n}."
        )
    if not P.symbol.x_dependent:
        logger.debug("Multiplier projection commutes with the reduction.")
        return P
    symbol = LeibnizProduct(
        LeibnizProduct(RS.R, P.symbol), RS.S, name=f"~{P.name or 'P'}"
    )
    return ProjectionSymbol(
        symbol,
        exact=False,
        rank_profile=dict(P.rank_profile),
        name=f"~{P.name or 'P'}",
    )
