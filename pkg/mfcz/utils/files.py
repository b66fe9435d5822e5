"""Reading and writing mfcz's JSON and JSON5 files."""

import hashlib
import json
import logging
from pathlib import Path

import json5

from mfcz.exceptions import MFCZInvalidFile


logger = logging.getLogger(__name__)

_MODULES = {".json": json, ".json5": json5}


def compute_file_hash(filename):
    """Return the SHA-256 hex digest of a file's contents."""
    return hashlib.sha256(Path(filename).read_bytes()).hexdigest()


def dump_data(data, filename, **kwargs):
    """Write data to a .json or .json5 file, replacing any existing file.

    Keyword arguments are forwarded to the encoder, e.g. ``indent=2``.
    """
    mod = _get_module(filename)
    with open(filename, "w") as f_out:
        mod.dump(data, f_out, **kwargs)
    logger.debug("Dumped data to %s", filename)


def load_data(filename):
    """Load a .json or .json5 file.

    Raises
    ------
    MFCZInvalidFile
        Raised if the extension is unsupported or the contents do not parse.

    """
    mod = _get_module(filename)
    with open(filename) as f_in:
        try:
            data = mod.load(f_in)
        except ValueError as exc:
            logger.exception("Failed to load data from %s", filename)
            raise MFCZInvalidFile(f"{filename} is not valid {mod.__name__}: {exc}") from exc

    logger.debug("Loaded data from %s", filename)
    return data


def _get_module(filename):
    suffix = Path(filename).suffix.lower()
    if suffix not in _MODULES:
        raise MFCZInvalidFile(f"unsupported extension {suffix!r} for {filename}")
    return _MODULES[suffix]
