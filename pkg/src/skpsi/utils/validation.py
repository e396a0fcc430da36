from typing import Any, Iterable

import numpy as np

from skpsi.exceptions import ConfigInvalid, ShapeMismatch


def validate_columns(input_columns: Iterable, required: list) -> list:
    """Validate required table columns.

    Args:
        input_columns (Iterable): Columns present in a result table.
        required (list): Columns the table must expose.

    Raises:
        ConfigInvalid: If the table is missing any of the required columns.

    Returns:
        list: the required columns, in order.
    """
    diff = set(required) - set(input_columns)
    if diff:
        raise ConfigInvalid(f"Table is missing the following columns: {diff}.")
    return list(required)


def ensure_list(input: Any) -> list:
    """Ensure input is a list.

    Args:
        input (Any): Input to be converted to a list.

    Returns:
        list: Input as a list.
    """
    if not isinstance(input, list):
        if isinstance(input, (str, int, float)):
            input = [input]
        else:
            input = list(input)
    return input


def check_increasing(values: Iterable, name: str, minimum: float = None):
    """Validate a strictly increasing sample list.

    Raises:
        ConfigInvalid: If ``values`` is empty, not strictly increasing, or
        starts below ``minimum``.
    """
    values = np.asarray(ensure_list(values), dtype=float)
    if values.size == 0:
        raise ConfigInvalid(f"{name} must not be empty.")
    if np.any(np.diff(values) <= 0):
        raise ConfigInvalid(f"{name} must be strictly increasing.")
    if minimum is not None and values[0] < minimum:
        raise ConfigInvalid(f"{name} must start at or above {minimum}.")
    return values


def check_square(matrix: np.ndarray, what: str = "matrix") -> np.ndarray:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ShapeMismatch(f"{what} must be square, got {matrix.shape}.")
    return matrix
