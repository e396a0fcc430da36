"""Excision and step functions used throughout the calculus.

Both are built from one monotone step ``s`` on ``[0, 1]`` with ``s = 0``
for ``t <= 0`` and ``s = 1`` for ``t >= 1``. The step is
``f(t) / (f(t) + f(1 - t))`` with ``f(t) = exp(-1 / t)``, smooth to every
order, and its derivatives are exact Taylor coefficients.
"""

from math import factorial

import numpy as np

__all__ = ["smoothstep", "excision", "hardy_step", "HARDY_TRANSITION"]

# exp(-1 / t) underflows below this distance from either end
_EDGE = 1e-3

# the Hardy step switches on between these two frequencies
HARDY_TRANSITION = (-0.5, -0.125)


def _flat_series(u: np.ndarray, sign: float, n: int) -> list:
    """Taylor coefficients in h of exp(-1 / (u + sign h)) up to order n."""
    r = 1.0 / u
    g = [-r * (-sign * r) ** k for k in range(n + 1)]
    e = [np.exp(g[0])]
    for k in range(1, n + 1):
        e.append(sum(j * g[j] * e[k - j] for j in range(1, k + 1)) / k)
    return e


def _step_series(t: np.ndarray, n: int) -> list:
    left = _flat_series(t, 1.0, n)
    right = _flat_series(1.0 - t, -1.0, n)
    total = [a + b for a, b in zip(left, right)]
    quotient = [left[0] / total[0]]
    for k in range(1, n + 1):
        carry = sum(total[j] * quotient[k - j] for j in range(1, k + 1))
        quotient.append((left[k] - carry) / total[0])
    return quotient


def smoothstep(t, n: int = 0) -> np.ndarray:
    """Evaluate the n-th derivative of the monotone smooth step.

    Parameters
    ----------
    t : array_like
        Evaluation points; the step is 0 for ``t <= 0`` and 1 for ``t >= 1``.
    n : int, default=0
        Derivative order.

    Returns
    -------
    numpy.ndarray
        The derivative values, same shape as ``t``.

    Examples
    --------
    >>> smoothstep([-1.0, 0.5, 2.0])
    array([0. , 0.5, 1. ])
    """
    t = np.asarray(t, dtype=float)
    inside = (t > 0) & (t < 1)
    series = _step_series(np.clip(t, _EDGE, 1.0 - _EDGE), n)
    out = np.where(inside, factorial(n) * series[n], 0.0)
    if n == 0:
        out = np.where(t >= 1, 1.0, out)
    return out


def excision(xi, radius: float = 1.0, n: int = 0) -> np.ndarray:
    """The zero-excision function chi(xi / radius) and its xi-derivatives.

    ``chi`` vanishes for ``|xi| <= radius / 2`` and equals one for
    ``|xi| >= radius``.

    Examples
    --------
    >>> excision([0.0, 0.75, 3.0])
    array([0. , 0.5, 1. ])
    """
    xi = np.asarray(xi, dtype=float)
    t = 2.0 * np.abs(xi) / radius - 1.0
    value = smoothstep(t, n)
    if n:
        value = value * (2.0 * np.sign(xi) / radius) ** n
    return value


def hardy_step(xi, n: int = 0) -> np.ndarray:
    """Smooth step equal to 1 at every integer ``k >= 0`` and 0 at ``k < 0``.

    Examples
    --------
    >>> hardy_step([-1.0, 0.0, 1.0])
    array([0., 1., 1.])
    """
    lo, hi = HARDY_TRANSITION
    scale = 1.0 / (hi - lo)
    value = smoothstep((np.asarray(xi, dtype=float) - lo) * scale, n)
    return value * scale**n if n else value
