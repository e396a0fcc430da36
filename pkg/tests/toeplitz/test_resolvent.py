import numpy as np
import pytest
from skpsi.core import CircleGrid, ParameterStrip
from skpsi.exceptions import ConfigInvalid, SpectralHypothesisFailed
from skpsi.symbols.catalog import bracket_power, get_symbol
from skpsi.toeplitz import (
    ResolventEstimator,
    make_hardy_projection,
    remark_identity_check,
    resolvent_family,
    resolvent_pipeline,
    spectral_equivalence_check,
)


@pytest.fixture(name="grid")
def get_grid():
    return CircleGrid(8)


@pytest.fixture(name="hardy")
def get_hardy():
    return make_hardy_projection(8)


@pytest.fixture(name="strip")
def get_strip():
    return ParameterStrip.log_spaced(np.pi, np.pi, 0, 3, 2)


def test_resolvent_family():
    family = resolvent_family(get_symbol("bessel1"))
    assert family.order == 1.0
    value = family.evaluate(0.0, 3.0, 2.0, np.pi / 2)[..., 0, 0]
    np.testing.assert_allclose(value, 2j - np.sqrt(10))

    with pytest.raises(ConfigInvalid):
        resolvent_family(get_symbol("bessel1"), mu=1.5)
    with pytest.raises(ConfigInvalid):
        resolvent_family(get_symbol("identity"))


def test_resolvent_pipeline(hardy, strip, grid):
    record = resolvent_pipeline(get_symbol("bessel1"), hardy, strip, grid)
    table = record.table
    assert {"z_real", "z_imag", "inverse_norm", "domain_gain"} <= set(
        table.columns
    )
    np.testing.assert_allclose(table.z_real, -table.tau, atol=1e-12)

    # the inverse of -(tau + <k>) on k >= 0 peaks at k = 0
    past = table[table.tau >= record.tau_threshold]
    np.testing.assert_allclose(
        past.inverse_norm, 1.0 / (past.tau + 1.0), rtol=1e-6
    )
    at_ten = table[np.isclose(table.tau, 10.0)]
    if record.tau_threshold <= 10.0:
        np.testing.assert_allclose(at_ten.inverse_norm, 1 / 11, rtol=1e-6)

    assert -1.1 <= record.fitted_slope <= -0.9
    assert record.C_fit > 0
    assert record.domain_gain <= 1.0 + 1e-8
    np.testing.assert_allclose(record.decades, 3.0)
    assert set(record.mixed_seminorms) and all(
        np.isfinite(v) for v in record.mixed_seminorms.values()
    )


def test_resolvent_pipeline_second_order(hardy, grid):
    # z = tau^2 e^{i theta}, so the decay is measured in |z| = tau^2
    strip = ParameterStrip.log_spaced(np.pi, np.pi, 1, 3, 2)
    record = resolvent_pipeline(
        bracket_power(2.0, parameter=False), hardy, strip, grid
    )
    table = record.table
    np.testing.assert_allclose(table.z_real, -table.tau**2, rtol=1e-12)
    np.testing.assert_allclose(table.z_imag, 0.0, atol=1e-6)

    past = table[table.tau >= record.tau_threshold]
    np.testing.assert_allclose(
        past.inverse_norm, 1.0 / (past.tau**2 + 1.0), rtol=1e-6
    )
    assert -1.1 <= record.fitted_slope <= -0.9
    np.testing.assert_allclose(record.decades, 4.0)
    assert record.domain_gain <= 1.0 + 1e-8


def test_spectral_hypothesis_failed(hardy, grid):
    # tau - <xi> vanishes on the positive frequencies
    strip = ParameterStrip(0.0, 0.0, [1.0, 10.0], [0.0])
    with pytest.raises(SpectralHypothesisFailed) as err:
        resolvent_pipeline(get_symbol("bessel1"), hardy, strip, grid)
    assert err.value.witness["z_direction"] == 1.0


def test_remark_identity(hardy, strip, grid):
    A, B = get_symbol("bessel1"), -get_symbol("bessel1")
    check = remark_identity_check(A, B, hardy, strip, grid)
    assert check["passed"]
    assert check["max_gap"] <= 1e-12
    assert check["spectral"]["agree"]

    spectral = spectral_equivalence_check(A, B, hardy, strip, n_rho=16)
    assert spectral["agree"]
    assert spectral["points"] == 2 * 16


def test_resolvent_estimator(hardy, strip):
    est = ResolventEstimator(projection=hardy, K=8).fit(
        get_symbol("bessel1"), strip
    )
    assert est.slope_ == est.record_.fitted_slope
    assert est.score() >= -0.1
    assert est.get_params()["K"] == 8
