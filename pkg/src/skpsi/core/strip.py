from dataclasses import dataclass

import numpy as np

from skpsi.exceptions import ConfigInvalid
from skpsi.utils.validation import check_increasing

__all__ = ["ParameterStrip", "sample_lambda"]

TWO_PI = 2 * np.pi


@dataclass(frozen=True, eq=False)
class ParameterStrip:
    """The parameter set {tau >= 0, theta_min <= theta <= theta_max}.

    Points lambda = (tau, theta) correspond to z = tau e^{i theta} in the
    sector of the complex plane.

    Parameters
    ----------
    theta_min, theta_max : float
        Angular interval with ``0 <= theta_min <= theta_max < 2 pi``.
    tau_samples : array_like
        Strictly increasing, nonnegative tau values.
    theta_samples : array_like, optional
        Strictly increasing angles inside the interval. Defaults to 9
        equispaced angles (a single angle when the interval is a point).
    """

    theta_min: float
    theta_max: float
    tau_samples: np.ndarray
    theta_samples: np.ndarray = None

    def __post_init__(self):
        if not 0 <= self.theta_min <= self.theta_max < TWO_PI:
            raise ConfigInvalid(
                "Angular interval must satisfy 0 <= theta_min <= theta_max "
                f"< 2 pi, got [{self.theta_min}, {self.theta_max}]."
            )
        taus = check_increasing(self.tau_samples, "tau_samples", minimum=0.0)
        thetas = self.theta_samples
        if thetas is None:
            n = 1 if self.theta_min == self.theta_max else 9
            thetas = np.linspace(self.theta_min, self.theta_max, n)
        thetas = check_increasing(thetas, "theta_samples")
        if thetas[0] < self.theta_min or thetas[-1] > self.theta_max:
            raise ConfigInvalid("theta_samples must lie inside the interval.")
        object.__setattr__(self, "tau_samples", taus)
        object.__setattr__(self, "theta_samples", thetas)

    @classmethod
    def log_spaced(
        cls,
        theta_min: float,
        theta_max: float,
        start: int = 0,
        stop: int = 3,
        per_decade: int = 4,
        n_theta: int = None,
    ) -> "ParameterStrip":
        """Log-spaced tau from 10**start to 10**stop, ``per_decade`` steps
        per decade.

        Examples
        --------
        >>> ParameterStrip.log_spaced(0.0, 0.0).tau_samples.size
        13
        """
        if stop < start or per_decade < 1:
            raise ConfigInvalid("Empty tau grid.")
        taus = np.logspace(start, stop, (stop - start) * per_decade + 1)
        thetas = None
        if n_theta is not None:
            thetas = np.linspace(theta_min, theta_max, n_theta)
        return cls(theta_min, theta_max, taus, thetas)

    @property
    def decades(self) -> float:
        positive = self.tau_samples[self.tau_samples > 0]
        if positive.size < 2:
            return 0.0
        return float(np.log10(positive[-1] / positive[0]))

    def polar(self) -> np.ndarray:
        """The sector points z = tau e^{i theta}, shape (n_tau, n_theta)."""
        return self.tau_samples[:, None] * np.exp(1j * self.theta_samples)

    def restrict(self, tau_min: float = 0.0, theta=None) -> "ParameterStrip":
        """A sub-strip with tau >= tau_min and, optionally, a single angle."""
        taus = self.tau_samples[self.tau_samples >= tau_min]
        if theta is None:
            return ParameterStrip(
                self.theta_min, self.theta_max, taus, self.theta_samples
            )
        return ParameterStrip(theta, theta, taus, [theta])


def sample_lambda(strip: ParameterStrip) -> list[tuple[float, float]]:
    """All (tau, theta) pairs of the strip, tau-major.

    Examples
    --------
    >>> sample_lambda(ParameterStrip(np.pi, np.pi, [1.0], [np.pi]))
    [(1.0, 3.141592653589793)]
    """
    return [
        (float(tau), float(theta))
        for tau in strip.tau_samples
        for theta in strip.theta_samples
    ]
