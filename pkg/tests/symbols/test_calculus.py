import numpy as np
import pytest
from skpsi.core import CircleGrid, ParameterStrip
from skpsi.exceptions import OrderGapInvalid, ShapeMismatch, TruncationTooDeep
from skpsi.quantization import interior_gap, oracle_compose, quantize
from skpsi.symbols.base import identity
from skpsi.symbols.calculus import (
    adjoint_symbol,
    asymptotic_sum,
    cutoff,
    leibniz_product,
)
from skpsi.symbols.catalog import bracket_power, get_symbol


@pytest.fixture(name="grid")
def get_grid():
    return CircleGrid(64)


def test_leibniz_against_oracle(grid):
    left, right = get_symbol("bessel-1"), get_symbol("exp-ix")
    lam = (1.0, 0.0)
    product = oracle_compose(
        quantize(left, lam, grid), quantize(right, lam, grid)
    )
    errors = [
        interior_gap(
            quantize(leibniz_product(left, right, N), lam, grid),
            product,
            grid.K / 4,
            grid.K / 2,
        )
        for N in range(4)
    ]
    assert np.all(np.diff(errors) < 0)
    assert errors[-1] <= 1e-4


def test_leibniz_of_multipliers(grid):
    # x-independent factors compose exactly at every truncation
    a, b = get_symbol("bessel1"), get_symbol("bessel-1")
    lam = (2.0, 0.5)
    exact = oracle_compose(quantize(a, lam, grid), quantize(b, lam, grid))
    approx = quantize(leibniz_product(a, b, 0), lam, grid)
    np.testing.assert_allclose(approx.matrix, exact.matrix, atol=1e-12)
    np.testing.assert_allclose(
        approx.matrix, np.eye(approx.matrix.shape[0]), atol=1e-12
    )


def test_leibniz_errors():
    with pytest.raises(TruncationTooDeep):
        leibniz_product(identity(), identity(), -1)
    with pytest.raises(ShapeMismatch):
        leibniz_product(identity(2), identity(3))


def test_adjoint():
    a = get_symbol("transport")
    star = adjoint_symbol(a)
    k = np.arange(-2, 3, dtype=float)
    np.testing.assert_allclose(
        star.evaluate(0.0, k, 3.0, 0.4),
        np.conj(a.evaluate(0.0, k, 3.0, 0.4)),
    )


def test_cutoff():
    c = cutoff(0.5)
    xi = np.array([0.0, 0.5, 1.5, 2.0, 5.0])
    np.testing.assert_allclose(
        c.evaluate(0.0, xi, 1.0, 0.0)[..., 0, 0], [0.0, 0.0, 0.5, 1.0, 1.0]
    )


def test_asymptotic_sum():
    strip = ParameterStrip.log_spaced(0.0, 0.0, 0, 2, 2)
    components = [identity(), bracket_power(-1.0), bracket_power(-2.0)]
    total = asymptotic_sum(components, strip, CircleGrid(16))
    assert total.order == 0.0
    assert len(total.cutoff_scales) == 3
    assert total.cutoff_scales[0] == 1.0
    assert all(0.0 < s <= 1.0 for s in total.cutoff_scales)

    with pytest.raises(OrderGapInvalid):
        asymptotic_sum([])
    with pytest.raises(OrderGapInvalid):
        asymptotic_sum([bracket_power(-1.0), identity()])
    with pytest.raises(OrderGapInvalid):
        asymptotic_sum([identity(), bracket_power(-0.5)])
    with pytest.raises(ShapeMismatch):
        asymptotic_sum([identity(), bracket_power(-1.0, n=2)])
