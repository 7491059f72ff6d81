"""
Ordered evaluation of independent grid points on a thread pool.

Results always come back in input order, so emitted tables do not depend on the
worker count.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    """Worker count from PENNING_AXIAL_WORKERS (1 when unset)."""
    value = os.getenv("PENNING_AXIAL_WORKERS", "1")
    try:
        workers = int(value)
    except ValueError:
        logger.warning(f"Ignoring non-integer PENNING_AXIAL_WORKERS={value!r}")
        return 1
    return max(1, workers)


class GridRunner:
    """Maps a pure function over grid points, sequentially or on a thread pool."""

    def __init__(self, workers: Optional[int] = None):
        """
        Initialize grid runner.

        Args:
            workers: Worker threads; None defers to PENNING_AXIAL_WORKERS at call time
        """
        self._workers = workers
        logger.debug(f"Grid runner initialized: workers={'env' if workers is None else workers}")

    @property
    def workers(self) -> int:
        return default_workers() if self._workers is None else self._workers

    def configure(self, workers: Optional[int]) -> None:
        """Override the worker count (None restores the environment default)."""
        if workers is not None and workers < 1:
            raise ValueError(f"workers must be at least 1, got {workers}")
        self._workers = workers
        logger.info(f"Grid runner using {self.workers} worker(s)")

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """
        Evaluate fn on every item.

        Args:
            fn: Pure function of one grid point
            items: Grid points

        Returns:
            Results in input order; the first exception raised by fn propagates
        """
        points = list(items)
        workers = min(self.workers, max(1, len(points)))
        if workers == 1:
            return [fn(p) for p in points]

        logger.debug(f"Evaluating {len(points)} grid points on {workers} threads")
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, points))


# Create singleton instance
grid_runner = GridRunner()
