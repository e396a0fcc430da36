import numpy as np
import pytest
from skpsi.core import CircleGrid, ParameterStrip
from skpsi.ellipticity import (
    EllipticityReport,
    check_ellipticity,
    check_refined,
    check_rough,
    excised_inverse,
    principal_triple,
    refine_minimum,
    sigma3_certificate,
)
from skpsi.exceptions import ReportFailed
from skpsi.symbols import identity
from skpsi.symbols.catalog import get_symbol


@pytest.fixture(name="grid")
def get_grid():
    return CircleGrid(8)


@pytest.fixture(name="strip")
def get_strip():
    return ParameterStrip.log_spaced(np.pi / 2, np.pi, 0, 2, 2, n_theta=3)


def test_refined_passes(strip, grid):
    report = check_refined(get_symbol("resolvent-reduced"), strip, grid)
    assert report.passed
    assert report.witness is None
    assert set(report.verdicts) == {"S1-principal", "S1-angular", "S2-limit"}
    assert all(np.isfinite(c) for c in report.constants.values())
    assert report.to_dict()["sigma3_certificate"]["heuristic"]


def test_refined_negative_control(grid):
    # tau e^{i0} - <xi> vanishes on the diagonal tau = |xi|
    strip = ParameterStrip.log_spaced(0.0, 0.0, 0, 2, 2)
    report = check_refined(get_symbol("resolvent-reduced"), strip, grid)
    assert not report.passed
    assert report.failed_conditions == ["S1-principal"]
    witness = report.witness
    assert witness["condition"] == "S1-principal"
    assert witness["value"] <= 1e-3
    np.testing.assert_allclose(witness["rho"], np.pi / 4, atol=1e-3)
    np.testing.assert_allclose(abs(witness["xi"]), witness["tau"], atol=1e-3)


def test_rough(strip, grid):
    report = check_rough(get_symbol("resolvent-reduced"), strip, grid)
    assert report.passed
    assert report.calculus == "rough"
    assert set(report.verdicts) == {"I", "II"}

    same = check_ellipticity(
        get_symbol("resolvent-reduced"), strip, grid, calculus="rough"
    )
    assert same.verdicts == report.verdicts
    with pytest.raises(ValueError):
        check_ellipticity(identity(), strip, grid, calculus="weak")


def test_excised_inverse():
    report = EllipticityReport("rough", {"I": True, "II": True})
    b = excised_inverse(get_symbol("bessel1"), report)
    k = np.array([0.0, 0.25, 1.0, 3.0])
    values = b.evaluate(0.0, k, 1.0, 0.0)[..., 0, 0]
    np.testing.assert_allclose(values, [0.0, 0.0, 1 / np.sqrt(2), 0.1**0.5])
    assert b.order == -1.0

    failed = EllipticityReport("rough", {"I": False, "II": True})
    with pytest.raises(ReportFailed) as err:
        excised_inverse(get_symbol("bessel1"), failed)
    assert err.value.report is failed


def test_sigma3_certificate():
    def diagonal(theta, K):
        return np.diag(2.0 + np.cos(theta) * np.arange(2 * K + 1) / (2 * K))

    certificate = sigma3_certificate(diagonal, [0.0, np.pi], 4)
    assert certificate.passed
    np.testing.assert_allclose(certificate.smallest_K, 1.0)
    assert certificate.theta == np.pi
    assert certificate.heuristic

    def shrinking(theta, K):
        return np.diag(1.0 / np.arange(1, 2 * K + 2))

    assert not sigma3_certificate(shrinking, [0.0], 4).passed


def test_principal_triple():
    triple = principal_triple(get_symbol("limit-model"))
    np.testing.assert_allclose(
        triple.angular(0.0, 1.0, 0.5)[..., 0, 0], np.exp(0.5j)
    )
    np.testing.assert_allclose(
        triple.limit(0.0, 3.0, 0.5)[..., 0, 0], np.exp(0.5j)
    )


def test_refine_minimum():
    point, value = refine_minimum(
        lambda p: (p[0] - 0.3) ** 2 + abs(p[1]), [0.0, 0.0], [(-1, 1), (0, 0)]
    )
    np.testing.assert_allclose(point, [0.3, 0.0], atol=1e-6)
    assert value <= 0.09
