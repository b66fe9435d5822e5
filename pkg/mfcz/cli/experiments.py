"""CLI commands to list and run the pre-defined experiments."""

import logging
import sys
from pathlib import Path

import click
import pandas as pd

from mfcz.cli.common import add_options, exit_on_error
from mfcz.exceptions import MFCZInvalidExperiment
from mfcz.experiments.registry import ExperimentType, list_experiments
from mfcz.experiments.runner import build_config, config_from_report, run
from mfcz.mfcz_rc import MfczRuntimeConfig
from mfcz.utils.utilities import display_table


logger = logging.getLogger(__name__)
_config = MfczRuntimeConfig.load()

_RUN_OPTIONS = (
    click.option(
        "--config",
        "config_file",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        default=None,
        help="Parameter file with key=value lines, or a JSON/JSON5 file.",
    ),
    click.option(
        "-s",
        "--set",
        "overrides",
        multiple=True,
        help="Override a parameter: --set key=value. Accepts multiple flags.",
    ),
    click.option(
        "--seed",
        type=int,
        default=None,
        help=f"Seed of the experiment generator. [default: {_config.default_seed}]",
    ),
    click.option(
        "-o",
        "--output-dir",
        type=Path,
        default=None,
        help=f"Output directory. [default: {_config.output_dir}/<experiment>]",
    ),
)

_PASSTHROUGH = {"ignore_unknown_options": True, "allow_extra_args": True}


def parse_extra_args(args) -> list:
    """Convert ``--key value`` and ``--key=value`` arguments into ``key=value`` strings.

    Dashes in keys become underscores, so ``--points-per-dim 512`` sets points_per_dim.
    """
    assignments = []
    index = 0
    while index < len(args):
        arg = args[index]
        if not arg.startswith("--") or len(arg) == 2:
            raise MFCZInvalidExperiment(f"expected --key value, got {arg!r}")
        key, sep, value = arg[2:].partition("=")
        if not sep:
            index += 1
            if index == len(args):
                raise MFCZInvalidExperiment(f"missing value for --{key}")
            value = args[index]
        assignments.append(f"{key.replace('-', '_')}={value}")
        index += 1
    return assignments


def _run_experiment(name, config_file, overrides, seed, output_dir, extra_args):
    if seed is None and config_file is None:
        seed = _config.default_seed
    config = build_config(
        name,
        config_file=config_file,
        overrides=list(overrides) + parse_extra_args(extra_args),
        seed=seed,
        output_dir=output_dir,
    )
    if config.output_dir is None:
        config.output_dir = _config.output_dir / name
    _finish(run(config), config.output_dir)


def _finish(report, output_dir):
    verdicts = pd.DataFrame(
        [{"verdict": k, "passed": v} for k, v in report.verdicts.items()],
        columns=["verdict", "passed"],
    )
    display_table(verdicts, title=f"{report.name} (seed {report.seed})")
    print(f"Wrote {report.name} output to {output_dir}", file=sys.stderr)
    if not report.passed:
        failed = [k for k, v in report.verdicts.items() if not v]
        print(f"{report.name} failed verdicts: {', '.join(failed)}", file=sys.stderr)
        sys.exit(1)


@click.command(name="list")
@exit_on_error
def list_command():
    """List the pre-defined experiments."""
    display_table(list_experiments(), title="Experiments")


@click.command(context_settings=_PASSTHROUGH)
@click.argument("name", required=False)
@add_options(_RUN_OPTIONS)
@click.option(
    "--from-report",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Re-run the configuration embedded in a report.json file.",
)
@click.pass_context
@exit_on_error
def run_command(ctx, name, config_file, overrides, seed, output_dir, from_report):
    """Run the experiment NAME.

    Parameters come from the preset defaults, then --config, then --set and
    --key value arguments. Exits with code 1 if any verdict fails.

    \b
    Examples:
    $ mfcz run lemma-sweep --set trials=5 --points-per-dim 1024
    $ mfcz run --from-report mfcz-output/lemma-sweep/report.json -o rerun
    """
    if from_report is not None:
        if name is not None or config_file is not None or overrides or ctx.args:
            raise MFCZInvalidExperiment("--from-report cannot be combined with other parameters")
        config = config_from_report(from_report, output_dir=output_dir)
        if seed is not None:
            config.seed = seed
        if config.output_dir is None:
            config.output_dir = _config.output_dir / config.name
        _finish(run(config), config.output_dir)
        return
    if name is None:
        raise MFCZInvalidExperiment("pass an experiment name or --from-report")
    _run_experiment(name, config_file, overrides, seed, output_dir, ctx.args)


def _make_preset_command(experiment_type: ExperimentType):
    name = experiment_type.value

    @click.command(name=name, context_settings=_PASSTHROUGH, help=experiment_type.description)
    @add_options(_RUN_OPTIONS)
    @click.pass_context
    @exit_on_error
    def command(ctx, config_file, overrides, seed, output_dir):
        _run_experiment(name, config_file, overrides, seed, output_dir, ctx.args)

    return command


preset_commands = [_make_preset_command(x) for x in ExperimentType]
