import numpy as np
from sklearn.linear_model import LinearRegression

__all__ = ["fit_loglog"]


def fit_loglog(x, y) -> tuple[float, float]:
    """Least-squares fit of ``log y = slope * log x + intercept``.

    Parameters
    ----------
    x, y : array_like
        Positive samples of equal length (at least two).

    Returns
    -------
    slope : float
        The fitted exponent.
    intercept : float
        The fitted constant, ``y ~ exp(intercept) * x**slope``.

    Examples
    --------
    >>> slope, intercept = fit_loglog([1.0, 10.0, 100.0], [2.0, 0.2, 0.02])
    >>> round(slope, 6), round(float(np.exp(intercept)), 6)
    (-1.0, 2.0)
    """
    x = np.log(np.asarray(x, dtype=float)).reshape(-1, 1)
    y = np.log(np.asarray(y, dtype=float))
    if len(y) < 2:
        raise ValueError("A log-log fit needs at least two samples.")
    model = LinearRegression().fit(x, y)
    return float(model.coef_[0]), float(model.intercept_)
