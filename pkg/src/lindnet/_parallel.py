import os
from concurrent.futures import ThreadPoolExecutor


def resolve_threads(threads=None) -> int:
    if threads is None:
        threads = os.environ.get("LINDNET_THREADS", 1)
    threads = int(threads)
    if threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    return threads


def ordered_map(fn, items, threads=None) -> list:
    """Map ``fn`` over ``items``; results come back in input order."""
    items = list(items)
    threads = resolve_threads(threads)
    if threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
