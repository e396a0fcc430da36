from dataclasses import dataclass

import numpy as np

from skpsi.exceptions import ConfigInvalid

__all__ = ["CircleGrid"]


@dataclass(frozen=True)
class CircleGrid:
    """Equispaced points on [0, 2 pi) and the frequency band -K..K.

    ``n_x`` defaults to the smallest alias-free value ``2 K + 2``.
    """

    K: int
    n_x: int = None
    N0: int = 1
    N1: int = 1

    def __post_init__(self):
        if self.K < 1:
            raise ConfigInvalid(f"K must be at least 1, got {self.K}.")
        n_x = 2 * self.K + 2 if self.n_x is None else int(self.n_x)
        if n_x < 2 * self.K + 2:
            raise ConfigInvalid(
                f"n_x={n_x} aliases frequencies up to K={self.K}; "
                f"need at least {2 * self.K + 2}."
            )
        object.__setattr__(self, "n_x", n_x)

    @property
    def x_samples(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_x) / self.n_x

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1, dtype=float)

    def band(self, low: float = 0.0, high: float = None) -> np.ndarray:
        """Mask of frequencies with low <= |k| <= high (default K/2)."""
        high = self.K / 2 if high is None else high
        k = np.abs(self.frequencies)
        return (k >= low) & (k <= high)

    def doubled(self) -> "CircleGrid":
        return CircleGrid(2 * self.K, None, self.N0, self.N1)

    def with_fibers(self, N0: int, N1: int) -> "CircleGrid":
        return CircleGrid(self.K, self.n_x, N0, N1)
