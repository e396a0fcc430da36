import numpy as np
import pytest
from skpsi.core import CircleGrid, ParameterStrip
from skpsi.exceptions import ShapeMismatch
from skpsi.symbols.catalog import get_symbol
from skpsi.toeplitz import (
    OrderReductionPair,
    make_hardy_projection,
    make_identity_projection,
    make_rotated_projection,
    make_zero_projection,
    tilde_conjugate,
)


@pytest.fixture(name="hardy")
def get_hardy():
    return make_hardy_projection(8)


def test_hardy_projection(hardy):
    assert hardy.exact
    assert hardy.rank_profile == {1.0: 1, -1.0: 0}
    P = hardy.quantize((3.0, 0.5), 8)
    np.testing.assert_array_equal(
        np.diag(P.matrix).real, (np.arange(-8, 9) >= 0).astype(float)
    )
    assert hardy.idempotence_residual((3.0, 0.5), 8, interior=False) == 0.0

    complement = hardy.complement()
    assert complement.rank_profile == {1.0: 0, -1.0: 1}
    np.testing.assert_array_equal(
        complement.quantize((3.0, 0.5), 8).matrix + P.matrix, np.eye(17)
    )


def test_trivial_projections():
    assert make_identity_projection(2).rank_profile == {1.0: 2, -1.0: 2}
    assert make_zero_projection().rank_profile == {1.0: 0, -1.0: 0}


def test_rotated_projection():
    P = make_rotated_projection()
    assert not P.exact
    assert P.rank_profile == {1.0: 1, -1.0: 1}
    # idempotent up to a smoothing error that stays away from the interior
    assert P.idempotence_residual((1.0, 0.0), 16) <= 1e-12
    assert P.idempotence_residual((1.0, 0.0), 16, interior=False) > 1e-3


def test_order_reduction_pair():
    strip = ParameterStrip.log_spaced(0.0, np.pi, 0, 3, 2, n_theta=3)
    for mu in (1.0, 2.0, 0.5):
        RS = OrderReductionPair(mu)
        assert RS.check_identity(strip, CircleGrid(8)) <= 1e-12
        assert RS.R.order == -mu
        assert RS.S.order == mu
    pair = OrderReductionPair(1.0, n=2)
    assert pair.check_identity(strip, CircleGrid(4)) <= 1e-12


def test_apply_reduction():
    RS = OrderReductionPair(1.0)
    reduced = RS.apply_reduction(get_symbol("param-bessel1"))
    assert reduced.order == 0.0
    xi = np.array([0.0, 3.0, -7.0])
    values = reduced.evaluate(0.0, xi, 4.0, 0.5)
    np.testing.assert_allclose(values[..., 0, 0], np.ones(3), atol=1e-12)


def test_tilde_conjugate(hardy):
    assert tilde_conjugate(hardy, OrderReductionPair(1.0)) is hardy

    rotated = make_rotated_projection()
    conjugated = tilde_conjugate(rotated, OrderReductionPair(1.0, n=2))
    assert not conjugated.exact
    assert conjugated.rank_profile == rotated.rank_profile
    assert conjugated.idempotence_residual((10.0, 0.0), 16) <= 1e-3

    with pytest.raises(ShapeMismatch):
        tilde_conjugate(rotated, OrderReductionPair(1.0))
