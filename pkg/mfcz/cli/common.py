import functools
import json
import logging
import sys

from mfcz.common import CSV_FLOAT_FORMAT
from mfcz.exceptions import MFCZBaseException, MFCZInvalidParameter
from mfcz.experiments.models import parse_value
from mfcz.frequency.freqset import FrequencySet, parse_theta
from mfcz.utils.files import dump_data
from mfcz.utils.utilities import display_table


logger = logging.getLogger(__name__)


def get_log_level_from_str(level):
    """Convert a log level string to logging type."""
    match level:
        case "debug":
            return logging.DEBUG
        case "info":
            return logging.INFO
        case "warning":
            return logging.WARNING
        case "error":
            return logging.ERROR
        case _:
            raise MFCZInvalidParameter(f"Unsupported level={level}")


def add_options(options):
    def _add_options(func):
        for option in reversed(options):
            func = option(func)
        return func

    return _add_options


def exit_on_error(func):
    """Print mfcz errors to stderr and exit with code 1 instead of raising."""

    @functools.wraps(func)
    def wrapped(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except MFCZBaseException as exc:
            logger.debug("Command failed", exc_info=True)
            print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
            sys.exit(1)

    return wrapped


def parse_sweep(text, name="sweep") -> list:
    """Parse ``a:b`` (inclusive), ``a,b,c`` or a single value into a list of numbers."""
    value = parse_value(text)
    values = value if isinstance(value, list) else [value]
    if not values or any(isinstance(x, (bool, str)) for x in values):
        raise MFCZInvalidParameter(f"{name} must be numbers, a list or a range: {text!r}")
    return values


def load_theta(text, seed=0) -> FrequencySet:
    """Frequency set from a preset (arith:N, random:N:seed, cluster:N:eps) or a CSV file."""
    return parse_theta(text, seed=seed)


def theta_prefix(theta: FrequencySet, count) -> FrequencySet:
    """First count frequencies of theta."""
    if count > theta.size:
        raise MFCZInvalidParameter(
            f"the frequency set has {theta.size} frequencies, {count} requested"
        )
    return FrequencySet(theta.freqs[:count], dim=theta.dim)


def emit_table(df, filename=None, title=None):
    """Write df as CSV when filename is set, otherwise print it."""
    if filename is None:
        display_table(df, title=title)
        return
    df.to_csv(filename, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info("Wrote %s", filename)
    print(f"Wrote {filename}", file=sys.stderr)


def emit_report(data: dict, filename=None):
    """Write data as JSON when filename is set, otherwise print it."""
    if filename is None:
        print(json.dumps(data, indent=2))
        return
    dump_data(data, filename, indent=2)
    logger.info("Wrote %s", filename)
    print(f"Wrote {filename}", file=sys.stderr)
