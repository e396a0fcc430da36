import numpy as np
import pytest
from skpsi.core import CircleGrid, ParameterStrip, sample_lambda
from skpsi.exceptions import ConfigInvalid


def test_strip():
    strip = ParameterStrip(np.pi / 2, np.pi, [1.0, 10.0, 100.0])
    assert strip.theta_samples.size == 9
    assert strip.theta_samples[0] == np.pi / 2
    assert strip.theta_samples[-1] == np.pi
    assert strip.decades == 2.0
    assert strip.polar().shape == (3, 9)

    single = ParameterStrip(np.pi, np.pi, [1.0])
    np.testing.assert_allclose(single.polar(), [[-1.0 + 0j]], atol=1e-15)

    restricted = strip.restrict(10.0, theta=np.pi)
    np.testing.assert_array_equal(restricted.tau_samples, [10.0, 100.0])
    np.testing.assert_array_equal(restricted.theta_samples, [np.pi])


def test_strip_invalid():
    with pytest.raises(ConfigInvalid):
        ParameterStrip(1.0, 0.5, [1.0])
    with pytest.raises(ConfigInvalid):
        ParameterStrip(0.0, 2 * np.pi, [1.0])
    with pytest.raises(ConfigInvalid):
        ParameterStrip(0.0, 1.0, [])
    with pytest.raises(ConfigInvalid):
        ParameterStrip(0.0, 1.0, [2.0, 1.0])
    with pytest.raises(ConfigInvalid):
        ParameterStrip(0.0, 1.0, [-1.0, 1.0])
    with pytest.raises(ConfigInvalid):
        ParameterStrip(0.0, 1.0, [1.0], [2.0])
    with pytest.raises(ConfigInvalid):
        ParameterStrip.log_spaced(0.0, 0.0, 3, 1)


def test_log_spaced():
    strip = ParameterStrip.log_spaced(0.0, np.pi, 1, 3, 4, n_theta=3)
    assert strip.tau_samples.size == 9
    np.testing.assert_allclose(strip.tau_samples[[0, -1]], [10.0, 1000.0])
    np.testing.assert_allclose(strip.theta_samples, [0.0, np.pi / 2, np.pi])


def test_sample_lambda():
    strip = ParameterStrip(0.0, 1.0, [1.0, 2.0], [0.0, 1.0])
    assert sample_lambda(strip) == [
        (1.0, 0.0),
        (1.0, 1.0),
        (2.0, 0.0),
        (2.0, 1.0),
    ]


def test_grid():
    grid = CircleGrid(4)
    assert grid.n_x == 10
    assert grid.x_samples.size == 10
    np.testing.assert_array_equal(grid.frequencies, np.arange(-4, 5))
    assert grid.band().sum() == 5
    assert grid.band(1.0, 2.0).sum() == 4
    assert grid.doubled().K == 8
    assert grid.with_fibers(2, 2).N0 == 2

    with pytest.raises(ConfigInvalid):
        CircleGrid(0)
    with pytest.raises(ConfigInvalid):
        CircleGrid(4, n_x=8)
