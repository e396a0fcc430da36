from .config import EXPERIMENTS, ExperimentConfig, load_config
from .experiments import RUNNERS, make_projection, run, sweep, witness_value
from .report import ReportEnvelope

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "load_config",
    "RUNNERS",
    "make_projection",
    "run",
    "sweep",
    "witness_value",
    "ReportEnvelope",
]
