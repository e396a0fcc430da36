import numpy as np
import pytest
from skpsi.exceptions import LambdaMismatch, ShapeMismatch, SingularToTolerance
from skpsi.quantization import (
    TruncatedOperator,
    interior_gap,
    oracle_compose,
    oracle_invert,
    quantize,
    sobolev_opnorm,
)
from skpsi.symbols.catalog import get_symbol
from skpsi.warnings import TruncationEdgeWarning


@pytest.fixture(name="lam")
def get_lam():
    return (1.0, 0.0)


def test_quantize_multiplier(lam):
    T = quantize(get_symbol("bessel1"), lam, 4)
    k = np.arange(-4, 5)
    np.testing.assert_allclose(T.matrix, np.diag(np.sqrt(1 + k**2)))
    assert (T.K, T.N0, T.N1) == (4, 1, 1)
    assert T.lam == lam


def test_quantize_shift(lam):
    # e^{ix} raises every frequency by one
    T = quantize(get_symbol("exp-ix"), lam, 2)
    np.testing.assert_allclose(T.matrix, np.eye(5, k=-1), atol=1e-12)

    P = quantize(get_symbol("rotated-projection"), lam, 3)
    assert P.matrix.shape == (14, 14)
    np.testing.assert_allclose(P.H.matrix, P.matrix, atol=1e-12)


def test_sobolev_opnorm(lam):
    K = 6
    T = quantize(get_symbol("bessel1"), lam, K)
    np.testing.assert_allclose(sobolev_opnorm(T), np.sqrt(1 + K**2))
    np.testing.assert_allclose(sobolev_opnorm(T, 1.0, 0.0), 1.0)
    np.testing.assert_allclose(sobolev_opnorm(T, 2.0, 1.0), 1.0)


def test_oracle_invert(lam):
    T = quantize(get_symbol("param-bessel1"), lam, 5)
    inverse, report = oracle_invert(T)
    np.testing.assert_allclose(
        oracle_compose(T, inverse).matrix, np.eye(11), atol=1e-12
    )
    assert report.condition >= 1.0
    assert report.regularization is None

    shift = TruncatedOperator(np.eye(11, k=-1), lam, 5)
    with pytest.raises(SingularToTolerance) as err:
        oracle_invert(shift)
    assert err.value.witness["smallest"] < 1e-12

    pseudo, report = oracle_invert(shift, regularize=1e-3)
    assert report.condition > 1e12
    assert pseudo.matrix.shape == (11, 11)


def test_compatibility(lam):
    A = TruncatedOperator.identity(lam, 2)
    with pytest.raises(LambdaMismatch):
        oracle_compose(A, TruncatedOperator.identity((2.0, 0.0), 2))
    with pytest.raises(ShapeMismatch):
        oracle_compose(A, TruncatedOperator.identity(lam, 3))
    with pytest.raises(ShapeMismatch):
        TruncatedOperator(np.eye(4), lam, 2)


def test_interior_gap(lam):
    K = 8
    A = TruncatedOperator.identity(lam, K)
    B = A.replace(np.diag(1.0 + (np.arange(-K, K + 1) == K)))
    # the only difference sits at the truncation edge
    assert interior_gap(A, B) == 0.0
    with pytest.warns(TruncationEdgeWarning):
        gap = interior_gap(A, B, 0, K)
    np.testing.assert_allclose(gap, 1.0)
