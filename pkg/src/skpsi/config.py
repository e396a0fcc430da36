from dataclasses import dataclass, fields

from skpsi.exceptions import ConfigInvalid


@dataclass
class CalculusConfig:
    """Numerical defaults shared by every module of the calculus.

    A single instance lives at :data:`calculus_config`; modules import it
    as ``from skpsi.config import calculus_config as cc`` and read the
    current values at call time, so :meth:`update` takes effect everywhere.
    """

    # finite differences
    fd_step: float = 1e-3
    noise_floor: float = 1e-6
    max_derivative_order: int = 4

    # truncated Fourier spaces
    K_test: int = 64
    K_acceptance: int = 256

    # oracle linear algebra
    inversion_rtol: float = 1e-12
    invertibility_threshold: float = 1e-6
    pivot_tol: float = 1e-10
    doubling_drift: float = 0.10

    # ellipticity and parametrices
    rho_min: float = 1e-3
    ellipticity_C: float = 1.0
    smallness: float = 0.5
    neumann_depth: int = 3
    max_neumann_depth: int = 6
    leibniz_order: int = 3
    max_leibniz_order: int = 6

    def update(self, **kwargs):
        known = {f.name for f in fields(self)}
        for key, value in kwargs.items():
            if key not in known:
                raise ConfigInvalid(f"Unknown calculus setting: {key}.")
            setattr(self, key, value)


calculus_config = CalculusConfig()
