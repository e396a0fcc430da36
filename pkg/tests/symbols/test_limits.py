import numpy as np
import pytest
from skpsi.core import CircleGrid, ParameterStrip
from skpsi.exceptions import NotInCalculus
from skpsi.symbols.catalog import get_symbol
from skpsi.symbols.limits import (
    limit_convergence,
    limit_family,
    membership_by_derivative_decay,
)


@pytest.fixture(name="grid")
def get_grid():
    return CircleGrid(16)


def test_limit_family():
    limit = limit_family(get_symbol("limit-model"))
    assert not limit.is_zero
    assert limit.order == 1.0
    xi = np.array([-3.0, 0.0, 5.0])
    for theta in (0.0, 1.0, np.pi):
        np.testing.assert_allclose(
            limit(0.0, xi, theta)[..., 0, 0], np.exp(1j * theta), atol=1e-12
        )

    assert limit_family(get_symbol("param-bessel-1")).is_zero
    with pytest.raises(NotInCalculus):
        limit_family(get_symbol("param-bessel1"))


def test_limit_convergence(grid):
    strip = ParameterStrip.log_spaced(0.0, 0.0, 1, 3, 2)
    table = limit_convergence(get_symbol("limit-model"), strip, grid)
    assert list(table.columns) == ["tau", "distance"]
    assert np.all(np.diff(table.distance) < 0)
    assert table.attrs["slope"] <= -0.9


def test_membership_by_derivative_decay(grid):
    strip = ParameterStrip.log_spaced(0.0, 0.0, 0, 3, 4)
    verdict = membership_by_derivative_decay(
        get_symbol("arctan-tau"), 0.5, strip, grid
    )
    assert verdict.passed
    # arctan(tau) tends to pi / 2, times the profile value 2 at xi = 0
    np.testing.assert_allclose(
        verdict.limit(0.0, np.array([0.0]), 0.0)[..., 0, 0].real,
        np.pi,
        atol=1e-4,
    )

    verdict = membership_by_derivative_decay(
        get_symbol("sin-log-tau"), 0.5, strip, grid
    )
    assert not verdict.passed
    assert verdict.limit is None
