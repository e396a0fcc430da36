"""Experiment configuration files for the command-line harness.

A configuration is a TOML file::

    experiment = "resolvent"
    seed = 0

    [grid]
    K = 64

    [strip]
    theta_min = 3.141592653589793
    theta_max = 3.141592653589793
    start = 1
    stop = 3
    per_decade = 4

    [symbol]
    A = "bessel1"
    projection = "hardy"

    [output]
    dir = "results"

Environment variables ``PSIDO_<SECTION>_<KEY>`` override file values, and
explicit keyword overrides (the CLI flags) override both.
"""

import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Union

from skpsi.core.grid import CircleGrid
from skpsi.core.strip import ParameterStrip
from skpsi.exceptions import ConfigInvalid
from skpsi.symbols.catalog import get_symbol, list_symbols

logger = logging.getLogger(__name__)

__all__ = ["EXPERIMENTS", "ExperimentConfig", "load_config"]

EXPERIMENTS = (
    "compose",
    "membership",
    "taylor",
    "ellipticity",
    "parametrix",
    "toeplitz",
    "resolvent",
    "invert",
    "sweep",
)
SECTIONS = ("grid", "strip", "symbol", "output")
ENV_PREFIX = "PSIDO_"
MAX_K = 512
MAX_DECADES = 6
PROJECTIONS = ("hardy", "rotated", "identity", "zero")
# symbol keys that name catalog entries
SYMBOL_KEYS = ("A", "B", "left", "right")
# keys that keep their case when read from the environment
UPPER_KEYS = ("K", "A", "B", "P0", "P1")
# symbol identifier for a seeded random trigonometric multiplier
RANDOM_SYMBOL = "random"


def _default_grid():
    return {"K": 64}


def _default_strip():
    return {
        "theta_min": 0.0,
        "theta_max": 0.0,
        "start": 0,
        "stop": 3,
        "per_decade": 4,
    }


def _default_output():
    return {"dir": "results"}


@dataclass
class ExperimentConfig:
    """A validated experiment description.

    ``symbol`` holds the experiment's inputs: catalog identifiers under
    ``A``, ``B``, ``left`` and ``right``, projection names under
    ``projection``, ``P0`` and ``P1`` and numerical parameters such as
    ``eps``, ``sobolev_s``, ``depth`` or ``calculus``. ``sweep`` runs the
    experiment named by ``symbol.base``.
    """

    experiment: str
    seed: int = 0
    grid: dict = field(default_factory=_default_grid)
    strip: dict = field(default_factory=_default_strip)
    symbol: dict = field(default_factory=dict)
    output: dict = field(default_factory=_default_output)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigInvalid(
                f"Unknown experiment {self.experiment!r}; "
                f"use one of {', '.join(EXPERIMENTS)}."
            )
        if not isinstance(self.seed, int):
            raise ConfigInvalid(f"seed must be an integer, got {self.seed!r}.")
        self.grid = {**_default_grid(), **self.grid}
        self.strip = {**_default_strip(), **self.strip}
        self.output = {**_default_output(), **self.output}
        K = self.grid["K"]
        if not isinstance(K, int) or not 1 <= K <= MAX_K:
            raise ConfigInvalid(f"grid.K must be an integer in 1..{MAX_K}.")
        if "thetas" in self.strip and not self.strip["thetas"]:
            raise ConfigInvalid("strip.thetas must not be empty.")
        if "taus" in self.strip:
            if not self.strip["taus"]:
                raise ConfigInvalid("Empty tau grid.")
        elif (
            self.strip["stop"] < self.strip["start"]
            or self.strip["per_decade"] < 1
        ):
            raise ConfigInvalid("Empty tau grid.")
        elif self.strip["stop"] - self.strip["start"] > MAX_DECADES:
            raise ConfigInvalid(
                f"The tau grid spans more than {MAX_DECADES} decades."
            )
        known = set(list_symbols())
        for key in SYMBOL_KEYS:
            ident = self.symbol.get(key)
            if ident not in known | {None, RANDOM_SYMBOL}:
                # raises CatalogMiss with the list of known names
                get_symbol(ident)
        for key in ("projection", "P0", "P1"):
            name = self.symbol.get(key)
            if name is not None and name not in PROJECTIONS:
                raise ConfigInvalid(
                    f"Unknown projection {name!r}; use one of "
                    f"{', '.join(PROJECTIONS)}."
                )
        if self.experiment == "sweep":
            base = self.symbol.get("base", "ellipticity")
            if base not in EXPERIMENTS or base == "sweep":
                raise ConfigInvalid(f"Cannot sweep experiment {base!r}.")

    def build_grid(self, K: Optional[int] = None) -> CircleGrid:
        K = self.grid["K"] if K is None else K
        return CircleGrid(K, self.grid.get("n_x"))

    def build_strip(self) -> ParameterStrip:
        """The parameter strip; raises ConfigInvalid for an empty tau grid."""
        s = self.strip
        thetas = s.get("thetas")
        if "taus" in s:
            return ParameterStrip(
                s["theta_min"], s["theta_max"], s["taus"], thetas
            )
        strip = ParameterStrip.log_spaced(
            s["theta_min"],
            s["theta_max"],
            s["start"],
            s["stop"],
            s["per_decade"],
            s.get("n_theta"),
        )
        if thetas is not None:
            strip = ParameterStrip(
                s["theta_min"], s["theta_max"], strip.tau_samples, thetas
            )
        return strip

    def with_experiment(self, experiment: str) -> "ExperimentConfig":
        data = self.to_dict()
        data["experiment"] = experiment
        return ExperimentConfig(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def _parse_value(raw: str):
    """Interpret an environment string as a TOML value, else as a string."""
    try:
        return tomllib.loads(f"value = {raw}")["value"]
    except tomllib.TOMLDecodeError:
        return raw


def _env_overrides(data: dict, env: Mapping[str, str]) -> dict:
    for name, raw in env.items():
        if not name.startswith(ENV_PREFIX):
            continue
        rest = name[len(ENV_PREFIX) :]
        if rest in ("EXPERIMENT", "SEED"):
            data[rest.lower()] = _parse_value(raw)
            continue
        section, _, key = rest.partition("_")
        section = section.lower()
        if section not in SECTIONS or not key:
            logger.debug("Ignoring environment variable %s", name)
            continue
        key = key if key in UPPER_KEYS else key.lower()
        data.setdefault(section, {})[key] = _parse_value(raw)
        logger.debug("Environment override %s.%s=%r", section, key, raw)
    return data


def load_config(
    path: Union[str, Path, None] = None,
    experiment: Optional[str] = None,
    env: Optional[Mapping[str, str]] = None,
    **overrides,
) -> ExperimentConfig:
    """Read a configuration file and apply the environment and overrides.

    Parameters
    ----------
    path : str or Path, optional
        TOML file; without it the defaults of ``experiment`` are used.
    experiment : str, optional
        Forces the experiment name.
    env : mapping, optional
        Environment to read ``PSIDO_`` overrides from; defaults to
        ``os.environ``.
    **overrides
        ``seed``, ``grid_K`` and ``out`` as given on the command line;
        ``None`` values are ignored.

    Raises
    ------
    ConfigInvalid
        If the file cannot be parsed or the result is invalid.
    CatalogMiss
        If a symbol identifier is unknown.

    Examples
    --------
    >>> config = load_config(experiment="compose", env={"PSIDO_GRID_K": "32"})
    >>> config.grid["K"]
    32
    >>> load_config(experiment="compose", env={}, grid_K=16).grid["K"]
    16
    """
    data = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as err:
            raise ConfigInvalid(
                f"Cannot read configuration {path}: {err}"
            ) from err
    unknown = set(data) - set(SECTIONS) - {"experiment", "seed"}
    if unknown:
        raise ConfigInvalid(f"Unknown configuration keys: {sorted(unknown)}.")
    data = _env_overrides(data, os.environ if env is None else env)
    if experiment is not None:
        data["experiment"] = experiment
    if overrides.get("seed") is not None:
        data["seed"] = overrides["seed"]
    if overrides.get("grid_K") is not None:
        data.setdefault("grid", {})["K"] = overrides["grid_K"]
    if overrides.get("out") is not None:
        data.setdefault("output", {})["dir"] = str(overrides["out"])
    if "experiment" not in data:
        raise ConfigInvalid("No experiment given.")
    config = ExperimentConfig(**data)
    logger.info("Loaded %s configuration", config.experiment)
    return config
