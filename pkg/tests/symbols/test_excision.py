import numpy as np
import pytest
from skpsi.symbols.excision import (
    HARDY_TRANSITION,
    excision,
    hardy_step,
    smoothstep,
)


def test_smoothstep():
    np.testing.assert_allclose(smoothstep([-1.0, 0.0, 0.5, 1.0, 2.0]),
                               [0.0, 0.0, 0.5, 1.0, 1.0])
    t = np.linspace(0.0, 1.0, 101)
    assert np.all(np.diff(smoothstep(t)) >= 0)

    # flat to every order at both ends
    for n in range(1, 7):
        np.testing.assert_allclose(smoothstep([0.0, 1.0], n), 0.0, atol=1e-12)


@pytest.mark.parametrize("radius", [0.5, 1.0, 4.0])
def test_excision(radius):
    xi = np.linspace(-3 * radius, 3 * radius, 61)
    chi = excision(xi, radius)
    np.testing.assert_allclose(chi, chi[::-1])
    assert np.all(chi[np.abs(xi) <= radius / 2] == 0.0)
    assert np.all(chi[np.abs(xi) >= radius] == 1.0)

    np.testing.assert_allclose(excision([0.0, 0.75, 3.0]), [0.0, 0.5, 1.0])


def test_excision_derivative():
    xi = np.linspace(0.55, 0.95, 9)
    h = 1e-6
    numeric = (excision(xi + h) - excision(xi - h)) / (2 * h)
    np.testing.assert_allclose(excision(xi, n=1), numeric, rtol=1e-5)


def test_hardy_step():
    k = np.arange(-4, 5)
    np.testing.assert_array_equal(hardy_step(k), (k >= 0).astype(float))
    np.testing.assert_allclose(hardy_step([-1.0, 0.0, 1.0]), [0.0, 1.0, 1.0])

    lo, hi = HARDY_TRANSITION
    assert -1 < lo < hi < 0
    assert 0.0 < hardy_step((lo + hi) / 2) < 1.0
    # the derivative lives on the transition only
    assert np.all(hardy_step(k, 1) == 0.0)


@pytest.mark.parametrize("n", [1, 3, 4, 6])
def test_smoothstep_high_derivatives(n):
    # each derivative differentiates the previous one, ends included
    t = np.concatenate([[0.005, 0.02], np.linspace(0.1, 0.9, 9), [0.98]])
    h = 1e-5
    numeric = (smoothstep(t + h, n - 1) - smoothstep(t - h, n - 1)) / (2 * h)
    scale = np.max(np.abs(smoothstep(np.linspace(0.0, 1.0, 201), n)))
    np.testing.assert_allclose(smoothstep(t, n), numeric, atol=1e-5 * scale)

    # continuous across the ends
    edges = smoothstep([1e-3, 1.0 - 1e-3, -1e-3, 1.0 + 1e-3], n)
    np.testing.assert_allclose(edges, 0.0, atol=1e-12)
