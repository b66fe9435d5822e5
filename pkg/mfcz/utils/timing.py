"""Execution-time logging and the process-wide timing statistics behind --timings."""

import functools
import logging
import time
from dataclasses import dataclass, field

import pandas as pd

from mfcz.utils.utilities import make_table

logger = logging.getLogger(__name__)

STAT_COLUMNS = ["name", "count", "total", "avg", "min", "max"]


def timed_info(func):
    """Log the execution time of func at INFO level."""
    return _timed(func, logging.INFO)


def timed_debug(func):
    """Log the execution time of func at DEBUG level."""
    return _timed(func, logging.DEBUG)


def _timed(func, level):
    @functools.wraps(func)
    def timed_(*args, **kwargs):
        start = time.perf_counter()
        result = func(*args, **kwargs)
        logger.log(
            level,
            "execution-time=%s func=%s",
            get_time_duration_string(time.perf_counter() - start),
            func.__qualname__,
        )
        return result

    return timed_


def get_time_duration_string(seconds):
    """Format seconds with the largest unit that keeps the value at least 1."""
    if seconds == 0:
        return "0 s"
    for scale, unit in ((1, "s"), (1e-3, "ms"), (1e-6, "us")):
        if seconds >= scale:
            return f"{seconds / scale:.3f} {unit}"
    return f"{seconds * 1e9:.3f} ns"


@dataclass
class TimerStats:
    """Durations recorded for one function."""

    name: str
    durations: list = field(default_factory=list)

    def update(self, duration):
        self.durations.append(duration)

    def summary(self) -> dict:
        count = len(self.durations)
        total = float(sum(self.durations))
        return {
            "name": self.name,
            "count": count,
            "total": total,
            "avg": total / count if count else 0.0,
            "min": min(self.durations, default=0.0),
            "max": max(self.durations, default=0.0),
        }


class Timer:
    """Context manager adding the duration of its block to a collector's stat."""

    def __init__(self, collector, name):
        self._stat = collector.get_stat(name)
        self._start = None

    def __enter__(self):
        if self._stat is not None:
            self._start = time.perf_counter()
        return self

    def __exit__(self, exc, value, tb):
        if self._stat is not None:
            self._stat.update(time.perf_counter() - self._start)


def track_timing(collector):
    """Record every call of the decorated function in collector when it is enabled."""

    def wrap(func):
        @functools.wraps(func)
        def timed_(*args, **kwargs):
            with Timer(collector, func.__qualname__):
                return func(*args, **kwargs)

        return timed_

    return wrap


class TimerStatsCollector:
    """Collects TimerStats by function name. Disabled collectors record nothing."""

    def __init__(self, is_enabled=False):
        self._stats = {}
        self._is_enabled = is_enabled

    @property
    def is_enabled(self) -> bool:
        return self._is_enabled

    def enable(self):
        self._is_enabled = True

    def disable(self):
        self._is_enabled = False

    def clear(self):
        self._stats.clear()

    def get_stat(self, name):
        """Return the TimerStats for name, or None when timing is disabled."""
        if not self._is_enabled:
            return None
        return self._stats.setdefault(name, TimerStats(name))

    def to_dataframe(self) -> pd.DataFrame:
        """Return one row per timed function, slowest total first."""
        df = pd.DataFrame([x.summary() for x in self._stats.values()], columns=STAT_COLUMNS)
        return df.sort_values("total", ascending=False, ignore_index=True)

    def log_stats(self, clear=False):
        """Log the stats table, optionally clearing it afterwards."""
        if not self._is_enabled:
            return
        if self._stats:
            logger.info("Timing statistics (seconds)\n%s", make_table(self.to_dataframe()))
        else:
            logger.info("No timing statistics were recorded.")
        if clear:
            self.clear()


timer_stats_collector = TimerStatsCollector()
