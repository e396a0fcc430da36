from .fitting import fit_loglog
from .parallel import parallel_map
from .validation import (
    check_increasing,
    check_square,
    ensure_list,
    validate_columns,
)

__all__ = [
    "fit_loglog",
    "parallel_map",
    "check_increasing",
    "check_square",
    "ensure_list",
    "validate_columns",
]
