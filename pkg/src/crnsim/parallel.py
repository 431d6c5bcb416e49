"""Thread fan-out that never changes results.

Work items carry their own random substreams, so the mapping below is a
pure scheduling choice: ``map_ordered`` returns results in input order
whether it runs serially or on a pool.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def map_ordered(fn, items, threads: int = 1) -> list:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
