import numpy as np
import pytest
from skpsi.exceptions import CatalogMiss
from skpsi.symbols.base import EvaluationPoints
from skpsi.symbols.catalog import (
    get_symbol,
    list_symbols,
    random_trig_polynomial,
    symbol_metadata,
)


def test_get_symbol():
    assert get_symbol("bessel1").order == 1.0
    assert get_symbol("param-bessel-1").order == -1.0
    assert get_symbol("rotated-projection").shape == (2, 2)
    assert "limit-model" in list_symbols()

    with pytest.raises(CatalogMiss):
        get_symbol("not-a-symbol")


def test_closed_forms():
    k = np.arange(-3, 4, dtype=float)
    values = get_symbol("bessel1").evaluate(0.0, k, 5.0, 0.0)[..., 0, 0]
    np.testing.assert_allclose(values, np.sqrt(1 + k**2))

    values = get_symbol("param-bessel1").evaluate(0.0, k, 2.0, 1.0)
    np.testing.assert_allclose(values[..., 0, 0], np.sqrt(5 + k**2))

    values = get_symbol("transport").evaluate(0.0, k, 2.0, np.pi / 2)
    np.testing.assert_allclose(values[..., 0, 0], 1j * k + 2j)


def test_rotated_projection():
    P = get_symbol("rotated-projection")
    x = np.linspace(0.0, 2 * np.pi, 7)
    values = P.evaluate(x, 0.0, 1.0, 0.0)
    np.testing.assert_allclose(values @ values, values, atol=1e-12)
    np.testing.assert_allclose(
        values, np.conj(np.swapaxes(values, -1, -2)), atol=1e-12
    )
    np.testing.assert_allclose(np.trace(values, axis1=-2, axis2=-1), 1.0)


def test_taylor_rho_derivative():
    a = get_symbol("taylor-rho")
    points = EvaluationPoints(0.0, 2.0, 1.0, 0.0)
    # d_xi arctan(xi / tau) = tau / (xi^2 + tau^2)
    value = a.diff(points, alpha=1)[..., 0, 0]
    np.testing.assert_allclose(value.real, 0.2, atol=1e-6)
    np.testing.assert_allclose(value.imag, 0.0, atol=1e-12)


def test_random_trig_polynomial():
    x = np.linspace(0.0, 2 * np.pi, 5)
    first = random_trig_polynomial(3, bandwidth=4).evaluate(x, 1.0, 1.0, 0.0)
    second = random_trig_polynomial(3, bandwidth=4).evaluate(x, 1.0, 1.0, 0.0)
    other = random_trig_polynomial(4, bandwidth=4).evaluate(x, 1.0, 1.0, 0.0)
    np.testing.assert_array_equal(first, second)
    assert not np.allclose(first, other)


def test_symbol_metadata():
    meta = symbol_metadata(get_symbol("bessel1"))
    assert meta["order"] == 1.0
    assert meta["classical"] is False
    assert not meta["tau_dependent"]
    np.testing.assert_allclose(
        [v[0] for v in meta["principal_fingerprint"]], [2.0, 1.0, 1.0, 2.0]
    )

    assert symbol_metadata(get_symbol("arctan-tau"))[
        "principal_fingerprint"
    ] is None


@pytest.mark.parametrize(
    "name",
    [
        "bessel1",
        "bessel-1",
        "param-bessel1",
        "param-bessel-1",
        "exp-ix",
        "hardy",
        "rotated-projection",
        "resolvent-reduced",
        "limit-model",
        "transport",
        "taylor-rho",
        "taylor-resolvent",
    ],
)
def test_principal_homogeneity(name):
    # xi stays away from 0 where |xi|^m and the Hardy step are singular
    x, xi, tau = np.meshgrid(
        [0.0, 0.3, 2.0], [-3.0, -1.5, 0.7, 2.5], [0.5, 1.0, 4.0], indexing="ij"
    )
    principal = get_symbol(name).principal
    assert principal is not None
    assert principal.check_homogeneity(x, xi, tau, 1.0)

    doubled = principal.evaluator(EvaluationPoints(x, 2 * xi, 2 * tau, 1.0))
    assert np.all(np.isfinite(doubled))
