"""Report envelopes: JSON summaries and CSV tables of one experiment run."""

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from skpsi.exceptions import ReportFailed
from skpsi.utils.validation import validate_columns

logger = logging.getLogger(__name__)

__all__ = ["ReportEnvelope", "TAG_COLUMNS", "to_jsonable"]

TAG_COLUMNS = ["tau", "theta"]
REPORT_NAME = "report.json"
# keys that differ between otherwise identical runs
CLOCK_KEYS = ("started", "wall_clock")


def to_jsonable(value):
    """Convert numpy scalars, arrays and complex numbers for ``json``."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"real": float(value.real), "imag": float(value.imag)}
    if isinstance(value, np.floating):
        return float(value)
    return value


@dataclass
class ReportEnvelope:
    """Everything one run produces.

    ``checks`` maps the name of each verified property to pass/fail;
    ``results`` holds scalar measurements and ``tables`` the per-lambda
    data frames, every one of them tagged with tau and theta columns.
    """

    experiment: str
    config: dict
    version: str
    results: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    slopes: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    started: float = field(default_factory=time.time)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.checks.values()) and not self.errors

    @property
    def failed_checks(self) -> list:
        return [name for name, ok in self.checks.items() if not ok]

    def add_table(self, name: str, table: pd.DataFrame):
        validate_columns(table.columns, TAG_COLUMNS)
        self.tables[name] = table.reset_index(drop=True)

    def check(self, name: str, ok) -> bool:
        self.checks[name] = bool(ok)
        if not ok:
            logger.info("Check %s failed", name)
        return bool(ok)

    def finish(self) -> "ReportEnvelope":
        self.wall_clock = time.time() - self.started
        return self

    def to_dict(self, clock: bool = True) -> dict:
        out = {
            "experiment": self.experiment,
            "version": self.version,
            "config": self.config,
            "passed": self.passed,
            "checks": self.checks,
            "results": self.results,
            "slopes": self.slopes,
            "errors": self.errors,
            "tables": sorted(self.tables),
            "started": self.started,
            "wall_clock": self.wall_clock,
        }
        if not clock:
            for key in CLOCK_KEYS:
                out.pop(key)
        return to_jsonable(out)

    def to_json(self, clock: bool = True) -> str:
        """JSON text; floats use the shortest round-trip representation."""
        return json.dumps(self.to_dict(clock), indent=2, sort_keys=True)

    def write(self, out_dir: Union[str, Path]) -> Path:
        """Write ``report.json`` and one ``<table>.csv`` per table."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, table in self.tables.items():
            table.to_csv(out / f"{name}.csv", index=False)
        path = out / REPORT_NAME
        path.write_text(self.to_json(), encoding="utf-8")
        logger.info("Wrote %s with %d tables", path, len(self.tables))
        return path

    def raise_for_status(self):
        if not self.passed:
            raise ReportFailed(
                f"{self.experiment}: failed checks {self.failed_checks}, "
                f"errors {sorted(self.errors)}."
            )
