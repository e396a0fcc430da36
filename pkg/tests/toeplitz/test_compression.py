import numpy as np
import pytest
from skpsi.core import CircleGrid, ParameterStrip
from skpsi.exceptions import EllipticityFailed, RankMismatch, ShapeMismatch
from skpsi.quantization import quantize
from skpsi.symbols.catalog import get_symbol
from skpsi.toeplitz import (
    ToeplitzOperator,
    extended_symbol,
    make_hardy_projection,
    make_identity_projection,
    make_zero_projection,
    orthonormality,
    range_basis,
    toeplitz_ellipticity,
    toeplitz_parametrix,
)


@pytest.fixture(name="grid")
def get_grid():
    return CircleGrid(8)


@pytest.fixture(name="hardy")
def get_hardy():
    return make_hardy_projection(8)


def test_range_basis():
    V = range_basis(np.diag([1.0, 0.0, 2.0, 0.0]))
    assert V.shape == (4, 2)
    assert orthonormality(V) <= 1e-12
    assert range_basis(np.zeros((3, 3))).shape == (3, 0)


def test_compress(hardy, grid):
    T = ToeplitzOperator(get_symbol("transport"), hardy, hardy)
    C = T.compress((2.0, np.pi / 2), grid)
    assert C.shape == (9, 9)
    # i (k + tau) on k = 0..K, up to the ordering of the basis
    np.testing.assert_allclose(
        np.sort(np.abs(np.linalg.eigvals(C))), 2.0 + np.arange(9)
    )
    assert (2.0, np.pi / 2) in T.compressed

    mixed = ToeplitzOperator(
        get_symbol("transport"), hardy, make_zero_projection()
    )
    with pytest.raises(RankMismatch):
        mixed.compress((2.0, 0.0), grid)


def test_toeplitz_ellipticity(hardy, grid):
    strip = ParameterStrip(np.pi / 2, np.pi / 2, [1.0, 10.0], [np.pi / 2])
    report = toeplitz_ellipticity(
        get_symbol("transport"), hardy, hardy, strip, grid
    )
    assert report.passed
    assert report.calculus == "toeplitz"

    # i xi - tau vanishes at xi = tau, inside the range of P
    strip = ParameterStrip(
        3 * np.pi / 2, 3 * np.pi / 2, [1.0, 10.0], [3 * np.pi / 2]
    )
    report = toeplitz_ellipticity(
        get_symbol("transport"), hardy, hardy, strip, grid
    )
    assert report.failed_conditions == ["1-principal"]
    assert report.witness["phi"] == 1.0
    assert report.witness["value"] <= 1e-3

    # the same symbol is fine on the complementary half-line
    Q = hardy.complement()
    assert toeplitz_ellipticity(
        get_symbol("transport"), Q, Q, strip, grid
    ).passed

    with pytest.raises(RankMismatch):
        toeplitz_ellipticity(
            get_symbol("transport"),
            hardy,
            make_identity_projection(),
            strip,
            grid,
        )


def test_toeplitz_parametrix(hardy, grid):
    strip = ParameterStrip.log_spaced(np.pi / 2, np.pi / 2, 0, 3, 1)
    result = toeplitz_parametrix(
        get_symbol("transport"), hardy, hardy, strip, grid
    )
    assert result.max_residual() <= 1e-8
    past = result.past_threshold()
    assert len(past) >= 2
    np.testing.assert_allclose(past.inverse_norm, 1.0 / past.tau, rtol=1e-6)
    assert np.nanmax(past.oracle_gap) <= 1e-8
    assert result.chain_residual <= 1e-12

    # the inverse vanishes off the range of P
    lam = (float(past.tau.iloc[-1]), np.pi / 2)
    inverse = result.inverses[lam].matrix
    np.testing.assert_allclose(inverse[:, :8], 0.0, atol=1e-12)
    np.testing.assert_allclose(inverse[:8, :], 0.0, atol=1e-12)

    strip = ParameterStrip(
        3 * np.pi / 2, 3 * np.pi / 2, [1.0, 10.0], [3 * np.pi / 2]
    )
    with pytest.raises(EllipticityFailed):
        toeplitz_parametrix(get_symbol("transport"), hardy, hardy, strip, grid)


def test_extended_symbol(hardy):
    a = get_symbol("transport")
    T = quantize(extended_symbol(a, hardy, hardy), (2.0, np.pi / 2), 8)
    # identity below zero, i (k + tau) on the Hardy range
    k = np.arange(-8, 9)
    expected = np.where(k < 0, 1.0, 1j * (k + 2.0))
    np.testing.assert_allclose(T.matrix, np.diag(expected), atol=1e-12)

    with pytest.raises(ShapeMismatch):
        extended_symbol(get_symbol("rotated-projection"), hardy, hardy)
