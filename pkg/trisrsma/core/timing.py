import logging
import time
from contextlib import contextmanager

logger = logging.getLogger(__name__)


class Stopwatch:
    """Elapsed wall time of a timed block"""

    def __init__(self):
        self.start = time.perf_counter()
        self.stop = None

    @property
    def elapsed_ms(self) -> float:
        end = self.stop if self.stop is not None else time.perf_counter()
        return (end - self.start) * 1e3


@contextmanager
def timed(label: str):
    """Time a block and log its duration"""
    watch = Stopwatch()
    try:
        yield watch
    finally:
        watch.stop = time.perf_counter()
        logger.debug(f"{label} took {watch.elapsed_ms:.2f} ms")
