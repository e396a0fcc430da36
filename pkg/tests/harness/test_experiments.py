import numpy as np
import pytest
from skpsi.exceptions import ConfigInvalid, SingularToTolerance
from skpsi.harness import ExperimentConfig, make_projection, run


def _config(experiment, symbol=None, strip=None, K=8):
    return ExperimentConfig(
        experiment, grid={"K": K}, strip=strip or {}, symbol=symbol or {}
    )


def test_make_projection():
    assert make_projection("hardy", 4).exact
    assert make_projection("rotated", 4).shape == (2, 2)
    with pytest.raises(ConfigInvalid):
        make_projection("riesz", 4)


def test_compose():
    envelope = run(_config("compose", {"tol": 1e-4}, K=64))
    assert envelope.passed, envelope.checks
    assert set(envelope.checks) == {"leibniz-decreasing", "leibniz-final"}
    assert list(envelope.tables["compose"].N) == [0, 1, 2, 3]


def test_taylor():
    envelope = run(_config("taylor"))
    assert envelope.passed
    table = envelope.tables["taylor"]
    assert len(table) == 6
    first = table[(table.phi == 1.0) & (table.j == 0)]
    np.testing.assert_allclose(first.real, 1.0, atol=1e-6)

    with pytest.raises(ConfigInvalid) as err:
        run(_config("taylor", {"A": "bessel1"}))
    assert any("taylor" in note for note in err.value.__notes__)


def test_ellipticity_negative_control():
    envelope = run(_config("ellipticity", {"expect": "fail"}))
    assert envelope.checks["negative-control"]
    assert envelope.checks["witness-small"]
    assert envelope.results["witness_value"] <= 1e-3


def test_toeplitz():
    strip = {"theta_min": np.pi / 2, "theta_max": np.pi / 2, "per_decade": 1}
    envelope = run(_config("toeplitz", strip=strip))
    assert envelope.passed, envelope.checks
    assert envelope.results["chain_residual"] <= 1e-12


def test_resolvent():
    strip = {"theta_min": np.pi, "theta_max": np.pi, "per_decade": 2}
    envelope = run(_config("resolvent", {"B": "bessel1"}, strip))
    assert envelope.passed, envelope.checks
    assert "remark-identity" in envelope.checks
    table = envelope.tables["resolvent"]
    assert {"tau", "theta", "z_real", "z_imag"} <= set(table.columns)


def test_sweep():
    envelope = run(
        _config("sweep", {"base": "taylor", "A": "bessel1"})
    )
    assert envelope.passed
    assert envelope.results["errors_by_K"] == {
        "8": "ConfigInvalid",
        "16": "ConfigInvalid",
    }

    strip = {"theta_min": np.pi / 2, "theta_max": np.pi, "per_decade": 1}
    envelope = run(
        _config(
            "sweep",
            {"base": "parametrix", "drift_keys": "tau_threshold"},
            strip,
        )
    )
    assert envelope.passed, envelope.checks
    assert "K:residuals" in envelope.checks
    assert "2K:residuals" in envelope.checks
    assert list(envelope.tables["sweep"].quantity) == ["tau_threshold"]


def test_invert():
    envelope = run(_config("invert"))
    assert envelope.passed, envelope.checks
    table = envelope.tables["invert"]
    assert len(table) == 13
    # <xi, tau> is diagonal with smallest entry <tau> at k = 0
    np.testing.assert_allclose(
        table.smallest, np.sqrt(1.0 + table.tau**2), rtol=1e-10
    )
    assert envelope.results["max_residual"] <= 1e-12

    with pytest.raises(SingularToTolerance) as err:
        run(_config("invert", {"A": "exp-ix"}))
    assert any("invert" in note for note in err.value.__notes__)


def test_sweep_invert_shift():
    # the truncated shift loses a mode at every cutoff
    envelope = run(_config("sweep", {"base": "invert", "A": "exp-ix"}))
    assert envelope.passed, envelope.checks
    assert envelope.results["errors_by_K"] == {
        "8": "SingularToTolerance",
        "16": "SingularToTolerance",
    }
    assert "sweep" not in envelope.tables
