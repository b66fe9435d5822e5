"""Manages the mfcz runtime configuration file"""

import logging
import sys
from pathlib import Path

from pydantic import Field, validator

from mfcz.common import (
    DEFAULT_MULTI_START_COUNT,
    DEFAULT_POWER_METHOD_RESTARTS,
    DEFAULT_SEED,
    DEFAULT_SUMSET_CAP,
    RC_FILENAME,
)
from mfcz.data_models import MFCZBaseModel
from mfcz.utils.files import dump_data, load_data

logger = logging.getLogger(__name__)


class MfczRuntimeConfig(MFCZBaseModel):
    """Defines the runtime config that can be stored in users' home directories."""

    console_level: str = "info"
    file_level: str = "info"
    timings: bool = False
    output_dir: Path = Path("mfcz-output")
    default_seed: int = Field(default=DEFAULT_SEED, ge=0)
    sumset_cap: int = Field(default=DEFAULT_SUMSET_CAP, gt=0)
    multi_start_count: int = Field(default=DEFAULT_MULTI_START_COUNT, gt=0)
    power_method_restarts: int = Field(default=DEFAULT_POWER_METHOD_RESTARTS, gt=0)

    @validator("console_level", "file_level")
    def check_level(cls, level):
        if level not in ("debug", "info", "warning", "error"):
            raise ValueError(f"unsupported log level: {level}")
        return level

    @classmethod
    def load(cls):
        """Load the mfcz runtime config if it exists or one with default values."""
        rc_file = cls.path()
        if rc_file.exists():
            return cls(**load_data(rc_file))
        return cls()

    def dump(self):
        """Dump the config to the user's home directory."""
        path = self.path()
        dump_data(self.serialize(), path, indent=2)
        print(f"Wrote mfcz config to {path}", file=sys.stderr)

    @staticmethod
    def path() -> Path:
        """Return the path to the config file."""
        return Path.home() / RC_FILENAME
