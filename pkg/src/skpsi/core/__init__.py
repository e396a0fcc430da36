from .grid import CircleGrid
from .seminorm import SeminormSpec, estimate_seminorm
from .strip import ParameterStrip, sample_lambda

__all__ = [
    "CircleGrid",
    "ParameterStrip",
    "sample_lambda",
    "SeminormSpec",
    "estimate_seminorm",
]
