"""Symbol-level operations of the calculus."""

import logging
from typing import Optional, Sequence

import numpy as np

from skpsi.config import calculus_config as cc
from skpsi.exceptions import OrderGapInvalid, ShapeMismatch
from skpsi.symbols.base import (
    Adjoint,
    FixedSymbol,
    HomogComponent,
    LeibnizProduct,
    Sum,
    SymbolExpr,
)
from skpsi.symbols.excision import excision

logger = logging.getLogger(__name__)

__all__ = ["leibniz_product", "adjoint_symbol", "asymptotic_sum", "cutoff"]

MAX_HALVINGS = 30


def leibniz_product(
    a: SymbolExpr, b: SymbolExpr, N: Optional[int] = None
) -> LeibnizProduct:
    """The Leibniz product a #_N b.

    Examples
    --------
    >>> from skpsi.symbols.base import identity
    >>> identity() @ identity()
    LeibnizProduct(order=0, shape=(1, 1))
    """
    return LeibnizProduct(a, b, N)


def adjoint_symbol(a: SymbolExpr, N: Optional[int] = None) -> Adjoint:
    return Adjoint(a, N)


def cutoff(scale: float, shape=(1, 1)) -> FixedSymbol:
    """The fixed order-zero symbol chi(scale * xi) times the identity."""
    radius = 1.0 / scale
    eye = np.eye(*shape)

    def evaluator(points):
        return excision(points.xi, radius)[..., None, None] * eye

    def derivative(points, alpha, beta):
        if beta > 0:
            return points.zeros(shape)
        return excision(points.xi, radius, alpha)[..., None, None] * eye

    return FixedSymbol(
        evaluator,
        0.0,
        shape,
        principal=HomogComponent(
            0.0, lambda points: points.fill(eye, shape), radius
        ),
        derivative=derivative,
        name=f"cutoff[{scale:g}]",
    )


def _contribution(term: SymbolExpr, order: float, strip, grid) -> float:
    from skpsi.core.seminorm import SeminormSpec, estimate_seminorm

    # fixed symbols are measured against <xi> alone
    gamma = None if term.tau_dependent else 0.0
    spec = SeminormSpec(mu=order + 1, gamma=gamma)
    return estimate_seminorm(term, spec, strip, grid)


def asymptotic_sum(
    components: Sequence[SymbolExpr], strip=None, grid=None, name=None
) -> Sum:
    """Sum components of orders mu, mu - 1, ... with shrinking cutoffs.

    Term k is multiplied by chi(c_k xi). Starting from ``c_k = 1`` the scale
    is halved until the order ``mu - k + 1`` sup seminorm of the term is at
    most ``2**-k`` on the sample grid. The scales used are stored on the
    result as ``cutoff_scales``.

    Raises
    ------
    OrderGapInvalid
        If the orders do not decrease in positive integer steps.
    """
    from skpsi.core import CircleGrid, ParameterStrip

    components = list(components)
    if not components:
        raise OrderGapInvalid("Asymptotic summation needs a component.")
    if len({c.shape for c in components}) != 1:
        raise ShapeMismatch("Components of an asymptotic sum differ in shape.")
    for left, right in zip(components, components[1:]):
        gap = left.order - right.order
        if gap < 1 - 1e-12 or abs(gap - round(gap)) > 1e-12:
            raise OrderGapInvalid(
                f"Orders {left.order:g} -> {right.order:g} are not an "
                "integer step apart."
            )
    strip = strip or ParameterStrip.log_spaced(0.0, 0.0, 0, 3, 2)
    grid = grid or CircleGrid(cc.K_test)
    shape = components[0].shape

    terms, scales = [], []
    for k, component in enumerate(components):
        scale = 1.0
        term = LeibnizProduct(cutoff(scale, shape), component, N=0)
        if k > 0:
            for _ in range(MAX_HALVINGS):
                if _contribution(term, component.order, strip, grid) <= 2.0**-k:
                    break
                scale /= 2
                term = LeibnizProduct(cutoff(scale, shape), component, N=0)
        terms.append(term)
        scales.append(scale)
    logger.info("Asymptotic sum cutoff scales: %s", scales)
    total = Sum(terms, name=name or "asymptotic-sum")
    total.cutoff_scales = scales
    return total
