from mfcz.utils.timing import timer_stats_collector  # noqa: F401
from ._version import __version__, __author__, __copyright__  # noqa: F401
