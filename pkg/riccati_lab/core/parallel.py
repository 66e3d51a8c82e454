from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from riccati_lab.core.config import settings

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    func: Callable[[T], R], items: Iterable[T], threads: int | None = None
) -> list[R]:
    items = list(items)
    workers = min(threads or settings.THREADS, max(len(items), 1))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
