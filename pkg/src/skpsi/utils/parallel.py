from typing import Callable, Iterable

from joblib import Parallel, delayed

__all__ = ["parallel_map"]


def parallel_map(fn: Callable, items: Iterable, n_jobs: int = None) -> list:
    """Map ``fn`` over ``items``, in order.

    With ``n_jobs`` in ``{None, 1}`` the loop runs in-process; otherwise it
    is dispatched through joblib. Results always come back in input order,
    so reductions over them are deterministic.
    """
    items = list(items)
    if n_jobs in [1, None]:
        return [fn(item) for item in items]
    return Parallel(n_jobs=n_jobs)(delayed(fn)(item) for item in items)
