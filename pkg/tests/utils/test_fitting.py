import numpy as np
import pytest
from skpsi.utils import fit_loglog, parallel_map


def test_fit_loglog():
    x = np.logspace(1, 3, 9)
    slope, intercept = fit_loglog(x, 3.0 / x)
    np.testing.assert_allclose(slope, -1.0, atol=1e-12)
    np.testing.assert_allclose(np.exp(intercept), 3.0, rtol=1e-12)

    with pytest.raises(ValueError):
        fit_loglog([1.0], [1.0])


def test_parallel_map():
    items = [1, 2, 3, 4]
    assert parallel_map(abs, items) == items
    assert parallel_map(abs, items, n_jobs=1) == items
    assert parallel_map(abs, [-1, -2], n_jobs=2) == [1, 2]
