"""Runs experiments and writes their tables and reports."""

import logging
import time
from pathlib import Path

import numpy as np
import pandas as pd

from mfcz._version import __version__
from mfcz.common import CSV_FLOAT_FORMAT, DEFAULT_SEED, REPORT_FILENAME
from mfcz.exceptions import MFCZInvalidExperiment, MFCZRuntimeError
from mfcz.experiments.models import (
    ExperimentConfig,
    ExperimentReport,
    load_parameters,
    parse_assignment,
)
from mfcz.experiments.registry import get_experiment
from mfcz.utils.files import dump_data
from mfcz.utils.timing import timer_stats_collector, track_timing


logger = logging.getLogger(__name__)

RESERVED_KEYS = ("seed", "output_dir")


def build_config(name, config_file=None, overrides=(), seed=None, output_dir=None):
    """Build an ExperimentConfig from a parameter file and key=value overrides.

    ``seed`` and ``output_dir`` may appear in the file or the overrides; the explicit
    arguments take precedence over both.
    """
    params = {} if config_file is None else load_parameters(config_file)
    for text in overrides:
        key, value = parse_assignment(text)
        params[key] = value
    file_seed = params.pop("seed", None)
    file_output_dir = params.pop("output_dir", None)
    if seed is None:
        seed = DEFAULT_SEED if file_seed is None else file_seed
    if output_dir is None and file_output_dir is not None:
        output_dir = Path(str(file_output_dir))
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise MFCZInvalidExperiment(f"seed must be an integer: {seed!r}")
    return ExperimentConfig(name=name, parameters=params, seed=seed, output_dir=output_dir)


def config_from_report(filename, output_dir=None) -> ExperimentConfig:
    """Return the config embedded in a report.json file."""
    config = ExperimentReport.load(filename).to_config()
    config.output_dir = output_dir
    return config


@track_timing(timer_stats_collector)
def execute(config: ExperimentConfig):
    """Run the experiment and return the report with the result tables.

    Returns
    -------
    tuple
        (ExperimentReport, dict of table name to DataFrame)

    """
    experiment = get_experiment(config.name)
    params = experiment.validate(config.parameters)
    output_dir = config.output_dir
    if output_dir is not None:
        output_dir.mkdir(parents=True, exist_ok=True)

    logger.info("Running %s with seed %s", config.name, config.seed)
    rng = np.random.default_rng(config.seed)
    start = time.perf_counter()
    result = experiment.generate(params, rng)
    duration = time.perf_counter() - start

    tables = {}
    for name, table in result.tables.items():
        if not isinstance(table, pd.DataFrame):
            raise MFCZRuntimeError(f"{config.name} produced a non-tabular result {name!r}")
        filename = f"{name}.csv"
        tables[name] = filename
        if output_dir is not None:
            path = output_dir / filename
            table.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
            logger.info("Wrote %s table to %s", name, path)

    report = ExperimentReport(
        name=config.name,
        anchor=experiment.ANCHOR,
        version=__version__,
        seed=config.seed,
        parameters=params,
        tables=tables,
        results=result.results,
        verdicts=result.verdicts,
        passed=result.passed,
        wall_clock_seconds=duration,
    )
    if output_dir is not None:
        path = output_dir / REPORT_FILENAME
        dump_data(report.serialize(), path, indent=2)
        logger.info("Wrote %s report to %s", config.name, path)
    failed = [k for k, v in result.verdicts.items() if not v]
    if failed:
        logger.warning("%s failed the verdicts %s", config.name, failed)
    else:
        logger.info("%s passed all verdicts in %.3f s", config.name, duration)
    return report, result.tables


def run(config: ExperimentConfig) -> ExperimentReport:
    """Run the experiment; tables are written when config.output_dir is set."""
    return execute(config)[0]
