"""Text export of truncated matrices for cross-implementation comparison.

The format is a JSON object with a header (shape, lambda, K, fibers) and a
base64 payload holding the matrix as little-endian complex128 values in
column-major order.
"""

import base64
import json
from pathlib import Path
from typing import Union

import numpy as np

from skpsi.exceptions import ShapeMismatch
from skpsi.quantization.operator import TruncatedOperator

__all__ = ["export_matrix", "load_matrix", "FORMAT_VERSION"]

FORMAT_VERSION = 1
_DTYPE = "<c16"


def export_matrix(
    T: TruncatedOperator, path: Union[str, Path, None] = None
) -> str:
    """Serialize ``T``; write it to ``path`` when given.

    Examples
    --------
    >>> T = TruncatedOperator.identity((1.0, 0.0), 1)
    >>> load_matrix(export_matrix(T)).matrix.shape
    (3, 3)
    """
    payload = np.asarray(T.matrix, dtype=_DTYPE).tobytes(order="F")
    document = {
        "format": "skpsi-matrix",
        "version": FORMAT_VERSION,
        "shape": list(T.matrix.shape),
        "lambda": {"tau": float(T.lam[0]), "theta": float(T.lam[1])},
        "K": int(T.K),
        "fibers": {"N0": int(T.N0), "N1": int(T.N1)},
        "sobolev_s": float(T.sobolev_s),
        "dtype": "complex128",
        "byteorder": "little",
        "order": "F",
        "payload": base64.b64encode(payload).decode("ascii"),
    }
    text = json.dumps(document)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def load_matrix(source: Union[str, Path]) -> TruncatedOperator:
    """Read a matrix written by :func:`export_matrix` (text or file path)."""
    text = str(source)
    if not text.lstrip().startswith("{"):
        text = Path(source).read_text(encoding="utf-8")
    document = json.loads(text)
    shape = tuple(document["shape"])
    raw = base64.b64decode(document["payload"])
    values = np.frombuffer(raw, dtype=_DTYPE)
    if values.size != shape[0] * shape[1]:
        raise ShapeMismatch(
            f"Payload holds {values.size} values, header says {shape}."
        )
    matrix = values.reshape(shape, order="F").astype(complex)
    lam = (document["lambda"]["tau"], document["lambda"]["theta"])
    return TruncatedOperator(
        matrix,
        lam,
        document["K"],
        document["fibers"]["N0"],
        document["fibers"]["N1"],
        document.get("sobolev_s", 0.0),
    )
