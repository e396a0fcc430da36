import json

import numpy as np
import pandas as pd
import pytest
from skpsi.exceptions import ConfigInvalid, ReportFailed
from skpsi.harness import ReportEnvelope
from skpsi.harness.report import to_jsonable


@pytest.fixture(name="envelope")
def get_envelope():
    envelope = ReportEnvelope("compose", {"seed": 0}, "0.0.1")
    envelope.add_table(
        "compose",
        pd.DataFrame({"tau": [1.0, 1.0], "theta": [0.0, 0.0], "N": [0, 1]}),
    )
    envelope.results["errors"] = {0: np.float64(0.5), 1: 0.25}
    envelope.check("leibniz-decreasing", True)
    return envelope


def test_to_jsonable():
    value = to_jsonable(
        {"z": 1 + 2j, "n": np.int64(3), "ok": np.bool_(True), "a": np.ones(2)}
    )
    assert value == {
        "z": {"real": 1.0, "imag": 2.0},
        "n": 3,
        "ok": True,
        "a": [1.0, 1.0],
    }


def test_envelope(envelope):
    assert envelope.passed
    envelope.check("other", False)
    assert not envelope.passed
    assert envelope.failed_checks == ["other"]
    with pytest.raises(ReportFailed):
        envelope.raise_for_status()

    with pytest.raises(ConfigInvalid):
        envelope.add_table("bad", pd.DataFrame({"tau": [1.0]}))


def test_write(envelope, tmp_path):
    path = envelope.finish().write(tmp_path / "run")
    report = json.loads(path.read_text(encoding="utf-8"))
    assert report["experiment"] == "compose"
    assert report["passed"]
    assert report["tables"] == ["compose"]
    assert report["results"]["errors"] == {"0": 0.5, "1": 0.25}
    assert report["wall_clock"] >= 0.0

    table = pd.read_csv(tmp_path / "run" / "compose.csv")
    assert list(table.columns) == ["tau", "theta", "N"]

    stable = envelope.to_json(clock=False)
    assert "wall_clock" not in json.loads(stable)
    assert stable == envelope.to_json(clock=False)
