import logging
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

logger = logging.getLogger(__name__)

__all__ = ["refine_minimum"]


def refine_minimum(
    objective: Callable[[np.ndarray], float],
    start: Sequence[float],
    bounds: Sequence[tuple],
) -> tuple[np.ndarray, float]:
    """Polish a grid minimizer of ``objective`` inside ``bounds``.

    Returns the better of the start point and the Nelder-Mead result, so
    the reported value never exceeds the grid value.
    """
    start = np.asarray(start, dtype=float)
    best = float(objective(start))
    free = [i for i, (lo, hi) in enumerate(bounds) if hi > lo]
    if not free:
        return start, best

    def restricted(z):
        point = start.copy()
        point[free] = z
        return objective(point)

    result = minimize(
        restricted,
        start[free],
        method="Nelder-Mead",
        bounds=[bounds[i] for i in free],
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000},
    )
    if result.fun < best:
        point = start.copy()
        point[free] = result.x
        logger.debug("Refined minimum %.3e -> %.3e", best, result.fun)
        return point, float(result.fun)
    return start, best
