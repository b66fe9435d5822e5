"""Experiment configuration and report models."""

import logging
from pathlib import Path
from typing import Any

from pydantic import Field, validator

from mfcz.common import DEFAULT_SEED
from mfcz.data_models import MFCZBaseModel
from mfcz.exceptions import MFCZInvalidExperiment, MFCZInvalidFile
from mfcz.utils.files import load_data


logger = logging.getLogger(__name__)


def parse_value(text: str):
    """Parse one parameter value.

    Recognized forms, tried in order: ``true``/``false``, int, float (including ``inf``),
    an inclusive integer range ``a:b``, a list ``a,b,c`` of any of the scalar forms, and
    finally a plain string.
    """
    text = text.strip()
    if "," in text:
        return [_parse_scalar(x) for x in text.split(",") if x.strip()]
    parts = text.split(":")
    if len(parts) == 2:
        try:
            start, stop = int(parts[0]), int(parts[1])
        except ValueError:
            return text
        step = 1 if stop >= start else -1
        return list(range(start, stop + step, step))
    return _parse_scalar(text)


def _parse_scalar(text: str):
    text = text.strip()
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_assignment(text: str) -> tuple:
    """Split ``key=value`` and parse the value."""
    key, sep, value = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise MFCZInvalidExperiment(f"expected key=value: {text!r}")
    return key, parse_value(value)


def parse_key_values(lines) -> dict:
    """Parse key=value lines, ignoring blank lines and lines starting with #."""
    params = {}
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, value = parse_assignment(line)
        if key in params:
            raise MFCZInvalidExperiment(f"duplicate parameter {key!r}")
        params[key] = value
    return params


def load_parameters(filename) -> dict:
    """Load parameters from a key=value text file or a JSON/JSON5 file."""
    filename = Path(filename)
    if not filename.is_file():
        raise MFCZInvalidFile(f"{filename} is not a file")
    if filename.suffix.lower() in (".json", ".json5"):
        data = load_data(filename)
        if not isinstance(data, dict):
            raise MFCZInvalidFile(f"{filename} must hold a flat object of parameters")
        return data
    return parse_key_values(filename.read_text().splitlines())


class ExperimentConfig(MFCZBaseModel):
    """Which experiment to run and with which parameters."""

    name: str = Field(title="name", description="Experiment name from the catalog")
    parameters: dict[str, Any] = Field(
        default={}, title="parameters", description="Overrides of the experiment's defaults"
    )
    seed: int = Field(default=DEFAULT_SEED, title="seed", ge=0)
    output_dir: Path | None = Field(
        default=None,
        title="output_dir",
        description="Directory for report.json and the CSV tables; None writes nothing",
    )

    @validator("parameters")
    def check_flat(cls, parameters):
        for key, value in parameters.items():
            if isinstance(value, dict):
                raise ValueError(f"parameter {key} is nested; configs are flat")
        return parameters


class ExperimentReport(MFCZBaseModel):
    """Outcome of one experiment run."""

    name: str = Field(title="name")
    anchor: str = Field(title="anchor", description="The claim the experiment checks")
    version: str = Field(title="version", description="mfcz version that produced the report")
    seed: int = Field(title="seed")
    parameters: dict[str, Any] = Field(
        title="parameters", description="Complete parameter set after applying the defaults"
    )
    tables: dict[str, str] = Field(
        default={}, title="tables", description="Table name to CSV file name"
    )
    results: dict[str, Any] = Field(
        default={}, title="results", description="Fitted exponents, envelopes and constants"
    )
    verdicts: dict[str, bool] = Field(default={}, title="verdicts")
    passed: bool = Field(title="passed", description="All verdicts pass")
    wall_clock_seconds: float = Field(title="wall_clock_seconds")

    def to_config(self) -> ExperimentConfig:
        """Return the config that reproduces this report."""
        return ExperimentConfig(name=self.name, parameters=self.parameters, seed=self.seed)
