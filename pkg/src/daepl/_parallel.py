import os
from concurrent.futures import ThreadPoolExecutor


def max_workers() -> int:
    """Thread cap from ``DAEPL_THREADS`` (default 1, i.e. serial)."""
    raw = os.environ.get("DAEPL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn, items):
    """``list(map(fn, items))``, threaded when ``DAEPL_THREADS > 1``.

    Results keep input order, so reductions over them are reproducible.
    """
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
