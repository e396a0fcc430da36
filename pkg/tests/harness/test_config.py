import numpy as np
import pytest
from skpsi.exceptions import CatalogMiss, ConfigInvalid
from skpsi.harness import ExperimentConfig, load_config

CONFIG = """
experiment = "resolvent"
seed = 3

[grid]
K = 16

[strip]
theta_min = 3.141592653589793
theta_max = 3.141592653589793
start = 1
stop = 2
per_decade = 2

[symbol]
A = "bessel1"
projection = "hardy"

[output]
dir = "out"
"""


@pytest.fixture(name="path")
def get_path(tmp_path):
    path = tmp_path / "resolvent.toml"
    path.write_text(CONFIG, encoding="utf-8")
    return path


def test_load_config(path):
    config = load_config(path, env={})
    assert config.experiment == "resolvent"
    assert config.seed == 3
    assert config.grid["K"] == 16
    assert config.symbol == {"A": "bessel1", "projection": "hardy"}
    strip = config.build_strip()
    np.testing.assert_allclose(strip.tau_samples, [10.0, 10**1.5, 100.0])
    np.testing.assert_allclose(strip.theta_samples, [np.pi])
    assert config.build_grid().K == 16
    assert config.build_grid(32).K == 32


def test_precedence(path):
    env = {
        "PSIDO_GRID_K": "32",
        "PSIDO_SEED": "5",
        "PSIDO_SYMBOL_A": '"bessel-1"',
        "PSIDO_OUTPUT_DIR": "elsewhere",
        "OTHER_GRID_K": "4",
    }
    config = load_config(path, env=env)
    assert config.grid["K"] == 32
    assert config.seed == 5
    assert config.symbol["A"] == "bessel-1"
    assert config.output["dir"] == "elsewhere"

    config = load_config(path, env=env, seed=7, grid_K=8, out="cli")
    assert (config.seed, config.grid["K"]) == (7, 8)
    assert config.output["dir"] == "cli"
    assert load_config(path, "taylor", env={}).experiment == "taylor"


def test_invalid_configs(tmp_path):
    with pytest.raises(ConfigInvalid):
        load_config(env={})
    with pytest.raises(ConfigInvalid):
        load_config(tmp_path / "missing.toml", env={})

    broken = tmp_path / "broken.toml"
    broken.write_text('experiment = "compose"\nfoo = 1\n', encoding="utf-8")
    with pytest.raises(ConfigInvalid):
        load_config(broken, env={})

    with pytest.raises(ConfigInvalid):
        ExperimentConfig("transmogrify")
    with pytest.raises(ConfigInvalid):
        ExperimentConfig("compose", strip={"start": 3, "stop": 1})
    with pytest.raises(ConfigInvalid):
        ExperimentConfig("compose", strip={"per_decade": 0})
    with pytest.raises(ConfigInvalid):
        ExperimentConfig("compose", strip={"taus": []})
    with pytest.raises(ConfigInvalid):
        ExperimentConfig("compose", grid={"K": 0})
    with pytest.raises(ConfigInvalid):
        ExperimentConfig("toeplitz", symbol={"projection": "riesz"})
    with pytest.raises(ConfigInvalid):
        ExperimentConfig("sweep", symbol={"base": "sweep"})
    with pytest.raises(CatalogMiss):
        ExperimentConfig("compose", symbol={"left": "nope"})


def test_config_roundtrip():
    config = ExperimentConfig(
        "membership",
        strip={"theta_max": 0.5, "taus": [1.0, 10.0], "thetas": [0.0, 0.5]},
    )
    strip = config.build_strip()
    np.testing.assert_allclose(strip.tau_samples, [1.0, 10.0])
    again = config.with_experiment("taylor")
    assert again.experiment == "taylor"
    assert again.strip == config.strip
