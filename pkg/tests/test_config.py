import pytest
from skpsi.config import calculus_config as cc
from skpsi.exceptions import ConfigInvalid


def test_update():
    before = cc.leibniz_order
    try:
        cc.update(leibniz_order=2)
        assert cc.leibniz_order == 2
    finally:
        cc.update(leibniz_order=before)
    with pytest.raises(ConfigInvalid):
        cc.update(unknown_setting=1)
