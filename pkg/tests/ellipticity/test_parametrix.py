import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from skpsi.core import ParameterStrip
from skpsi.ellipticity import (
    Parametrix,
    invert_one_plus_smoothing,
    neumann_parametrix,
)
from skpsi.exceptions import DepthTooLarge, EllipticityFailed, NeverSmall
from skpsi.quantization import encode_smoothing, quantize
from skpsi.symbols import constant
from skpsi.symbols.catalog import get_symbol

TAUS = (1.0, 10.0, 100.0, 1000.0)


def _family(seed, scale, power=-1.0):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    m /= np.linalg.norm(m, 2)
    return {
        (tau, theta): scale * tau**power * m
        for tau in TAUS
        for theta in (0.0, 1.0)
    }


@pytest.fixture(name="strip")
def get_strip():
    return ParameterStrip.log_spaced(np.pi / 2, np.pi, 0, 3, 1, n_theta=2)


def test_neumann_parametrix():
    b = neumann_parametrix(constant(4.0), L=2)
    values = b.evaluate(0.0, np.arange(-3.0, 4.0), 2.0, 0.0)
    np.testing.assert_allclose(values[..., 0, 0], 0.25)

    with pytest.raises(DepthTooLarge):
        neumann_parametrix(constant(4.0), L=-1)


@settings(deadline=None, max_examples=25)
@given(
    seed=st.integers(0, 2**32 - 1),
    scale=st.floats(0.05, 3.0, allow_nan=False),
)
def test_one_plus_smoothing_identity(seed, scale):
    family = _family(seed, scale)
    inverse = invert_one_plus_smoothing(encode_smoothing(family))
    assert inverse.threshold in TAUS
    assert inverse.threshold == max(inverse.threshold_per_theta.values())
    eye = np.eye(5)
    for lam, r in family.items():
        if lam[0] < inverse.threshold:
            continue
        s = inverse.kernel.matrix(lam)
        np.testing.assert_allclose((eye + r) @ (eye + s), eye, atol=1e-10)
        np.testing.assert_allclose((eye + s) @ (eye + r), eye, atol=1e-10)


def test_one_plus_smoothing_threshold():
    # norms 2 / tau drop below 1/2 from tau = 10 on
    inverse = invert_one_plus_smoothing(encode_smoothing(_family(0, 2.0)))
    assert inverse.threshold == 10.0
    assert inverse.threshold_per_theta == {0.0: 10.0, 1.0: 10.0}
    # below the threshold only -r is kept
    np.testing.assert_allclose(
        inverse.kernel.matrix((1.0, 0.0)), -_family(0, 2.0)[(1.0, 0.0)]
    )

    with pytest.raises(NeverSmall):
        invert_one_plus_smoothing(encode_smoothing(_family(0, 1.0, 1.0)))
    with pytest.raises(NeverSmall):
        invert_one_plus_smoothing(
            encode_smoothing(_family(0, 2.0)), smallness=1e-4
        )


def test_parametrix_estimator(strip):
    a = get_symbol("resolvent-reduced")
    est = Parametrix(K=8).fit(a, strip)
    assert est.tau_threshold_ in strip.tau_samples
    result = est.result_
    assert result.max_residual() <= 1e-8
    assert list(est.residuals_.columns) == [
        "tau",
        "theta",
        "residual_left",
        "residual_right",
        "oracle_gap",
    ]
    assert np.nanmax(result.past_threshold().oracle_gap) <= 1e-8

    lam = (1000.0, np.pi)
    A = quantize(a, lam, 8)
    np.testing.assert_allclose(
        (est.inverse(lam) @ A).matrix, np.eye(17), atol=1e-8
    )


def test_parametrix_rejects_non_elliptic():
    strip = ParameterStrip.log_spaced(0.0, 0.0, 0, 2, 1)
    with pytest.raises(EllipticityFailed) as err:
        Parametrix(K=8).fit(get_symbol("resolvent-reduced"), strip)
    assert not err.value.report.passed

    with pytest.raises(ValueError):
        Parametrix(calculus="weak").fit(constant(1.0), strip)
