import numpy as np
import pytest
from skpsi.ellipticity import invert_one_plus_smoothing
from skpsi.exceptions import LambdaMismatch, ShapeMismatch
from skpsi.quantization import (
    TruncatedOperator,
    encode_smoothing,
    export_matrix,
    load_matrix,
    quantize,
)
from skpsi.symbols.base import Sum, identity


@pytest.fixture(name="family")
def get_family():
    rng = np.random.default_rng(0)
    base = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    base /= np.linalg.norm(base, 2)
    return {(tau, 0.0): base / tau**2 for tau in (1.0, 10.0, 100.0)}


def test_encode_smoothing(family):
    kernel = encode_smoothing(family)
    assert kernel.K == 2
    assert kernel.vanishing_at_infinity
    np.testing.assert_allclose(kernel.certificates[0], 1.0)
    assert kernel.certificates[3] > kernel.certificates[1]
    assert list(kernel.norms.columns) == ["tau", "theta", "norm"]

    growing = {lam: m * lam[0] ** 4 for lam, m in family.items()}
    assert not encode_smoothing(growing).vanishing_at_infinity

    with pytest.raises(LambdaMismatch):
        kernel.matrix((5.0, 0.0))
    with pytest.raises(ShapeMismatch):
        encode_smoothing({(1.0, 0.0): np.eye(4)}, K=2)
    with pytest.raises(ShapeMismatch):
        encode_smoothing({})


def test_rounding_level_family_vanishes(family):
    # residuals of an exact inverse sit at rounding level and do not decay
    base = family[(1.0, 0.0)]
    scales = {1.0: 1.0, 10.0: 10.0, 100.0: 0.5, 1000.0: 10.0}
    eps = np.finfo(float).eps
    noise = {(tau, 0.0): eps * s * base for tau, s in scales.items()}
    kernel = encode_smoothing(noise)
    assert kernel.vanishing_at_infinity

    inverse = invert_one_plus_smoothing(kernel)
    assert inverse.threshold == 1.0

    flat = {(tau, 0.0): (1 + 1e-3 * tau) * base for tau in scales}
    assert not encode_smoothing(flat).vanishing_at_infinity


def test_smoothing_symbol(family):
    kernel = encode_smoothing(family)
    lam = (10.0, 0.0)
    symbol = kernel.as_symbol()
    T = quantize(symbol, lam, 2)
    np.testing.assert_array_equal(T.matrix, family[lam])

    shifted = quantize(Sum([identity(), symbol]), lam, 2)
    np.testing.assert_allclose(shifted.matrix, np.eye(5) + family[lam])

    operators = {lam: TruncatedOperator(m, lam, 2) for lam, m in family.items()}
    assert encode_smoothing(operators).K == 2


def test_export(tmp_path, family):
    T = TruncatedOperator(family[(10.0, 0.0)], (10.0, 0.0), 2, sobolev_s=1.5)
    path = tmp_path / "matrix.json"
    export_matrix(T, path)
    loaded = load_matrix(path)
    np.testing.assert_array_equal(loaded.matrix, T.matrix)
    assert loaded.lam == (10.0, 0.0)
    assert loaded.sobolev_s == 1.5
