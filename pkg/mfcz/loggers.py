"""Logging setup for the mfcz CLI and scripts."""

import logging
import logging.config
from contextlib import contextmanager
from pathlib import Path

import click


CONSOLE_FORMAT = "%(asctime)s - %(levelname)s [%(name)s] : %(message)s"
FILE_FORMAT = "%(asctime)s - %(levelname)s [%(name)s %(filename)s:%(lineno)d] : %(message)s"

# numpy and scipy report overflow and non-convergence through the warnings module.
WARNINGS_LOGGER = "py.warnings"


def _handlers(console_level, file_level, filename, mode):
    handlers = {
        "console": {
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "level": console_level,
            "formatter": "console",
        },
    }
    if filename is not None:
        handlers["file"] = {
            "class": "logging.FileHandler",
            "filename": str(filename),
            "mode": mode,
            "level": file_level,
            "formatter": "file",
        }
    return handlers


def setup_logging(
    name, filename, console_level=logging.INFO, file_level=logging.INFO, packages=None, mode="w"
):
    """Configure console and file logging for name, mfcz and any extra packages.

    Parameters
    ----------
    name : str
        logger to return
    filename : str | Path | None
        log file; None logs to the console only
    console_level : int
    file_level : int
    packages : list, optional
        additional package loggers to route to the same handlers
    mode : str
        "w" or "a"

    Returns
    -------
    logging.Logger

    """
    handlers = _handlers(console_level, file_level, filename, mode)
    logger_names = {name, "mfcz", WARNINGS_LOGGER, *(packages or [])}
    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "console": {"format": CONSOLE_FORMAT},
                "file": {"format": FILE_FORMAT},
            },
            "handlers": handlers,
            "loggers": {
                x: {"handlers": list(handlers), "level": "DEBUG", "propagate": False}
                for x in logger_names
            },
        }
    )
    logging.captureWarnings(True)
    return logging.getLogger(name)


def check_log_file_size(filename, limit_mb=10, no_prompts=False):
    """Offer to delete the log file once it is larger than limit_mb."""
    path = Path(filename)
    if no_prompts or not path.exists():
        return

    size_mb = path.stat().st_size / (1024 * 1024)
    if size_mb > limit_mb and click.confirm(
        f"The log file {path} has exceeded {limit_mb} MiB. Delete it?", default=True
    ):
        path.unlink()


@contextmanager
def disable_console_logging(name="mfcz"):
    """Silence the console handler of name while the block runs."""
    handlers = [x for x in logging.getLogger(name).handlers if x.name == "console"]
    levels = [x.level for x in handlers]
    for handler in handlers:
        handler.setLevel(logging.FATAL)
    try:
        yield
    finally:
        for handler, level in zip(handlers, levels):
            handler.setLevel(level)
