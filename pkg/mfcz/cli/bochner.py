"""CLI commands for generalized Bochner-Riesz multipliers."""

import logging
import sys
from pathlib import Path

import click
import numpy as np

from mfcz.bochner.domains import DomainPreset
from mfcz.bochner.multiplier import kernel_scaling, uj_norm_scan
from mfcz.cli.common import add_options, emit_table, exit_on_error, parse_sweep
from mfcz.common import CSV_FLOAT_FORMAT
from mfcz.experiments.bochner_experiments import build_decomposition
from mfcz.experiments.norm_experiments import WeightPreset, make_weight
from mfcz.mfcz_rc import MfczRuntimeConfig


logger = logging.getLogger(__name__)
_config = MfczRuntimeConfig.load()

_SYMBOL_OPTIONS = (
    click.option(
        "-d",
        "--domain",
        type=click.Choice(DomainPreset.values()),
        default=DomainPreset.DISK.value,
        show_default=True,
        help="Planar domain of the multiplier.",
    ),
    click.option("--delta", type=float, default=1.0, show_default=True, help="Exponent delta."),
    click.option(
        "-g", "--grid", type=int, default=256, show_default=True, help="Lattice points per axis."
    ),
    click.option(
        "--band",
        type=float,
        default=1.25,
        show_default=True,
        help="The lattice covers [-band, band)^2.",
    ),
    click.option(
        "--min-pixels", type=int, default=2, show_default=True, help="Smallest Whitney cube side."
    ),
    click.option(
        "--epsilon", type=float, default=0.1, show_default=True, help="Partition overlap."
    ),
)


def _decomposition(domain, delta, grid, band, min_pixels, epsilon):
    return build_decomposition(
        {
            "domain": domain,
            "delta": delta,
            "points_per_dim": grid,
            "band": band,
            "min_pixels": min_pixels,
            "epsilon": epsilon,
        }
    )


@click.command(name="brkernel")
@add_options(_SYMBOL_OPTIONS)
@click.option("-j", "--j", "scales", default="-2:-5", show_default=True, help="Scales j.")
@click.option("-M", "--decay", type=int, default=2, show_default=True, help="Tail exponent M.")
@click.option("--tail-s", type=float, default=1.5, show_default=True, help="s of the L^{s'} tail.")
@click.option(
    "--min-decay-lengths",
    type=float,
    default=8.0,
    show_default=True,
    help="Kernel decay lengths 2^-j required per torus side.",
)
@click.option("-o", "--out", type=Path, default=None, help="Output CSV file.")
@exit_on_error
def brkernel(
    domain, delta, grid, band, min_pixels, epsilon, scales, decay, tail_s, min_decay_lengths, out
):
    """Whitney counts and kernel norms of the single-scale pieces.

    The fitted slopes in j are appended to the CSV as comment lines.

    \b
    Example:
    $ mfcz brkernel --domain disk --delta 1 --grid 1024 --j -3:-8 --out kernels.csv
    """
    decomposition = _decomposition(domain, delta, grid, band, min_pixels, epsilon)
    report = kernel_scaling(
        decomposition,
        [int(x) for x in parse_sweep(scales, "j")],
        decay=decay,
        s=tail_s,
        min_decay_lengths=min_decay_lengths,
    )
    slopes = {
        "count_slope": report.count_slope,
        "sigma_slope": report.sigma_slope,
        "kernel_l1_slope": report.kernel_l1_slope,
        "tail_linf_slope": report.tail_linf_slope,
    }
    emit_table(report.table, out, title=f"{domain} kernels, delta={delta:g}")
    if out is None:
        for key, value in slopes.items():
            print(f"{key}={value:.6g}")
        return
    with open(out, "a") as f_out:
        for key, value in slopes.items():
            f_out.write(f"# {key}={CSV_FLOAT_FORMAT % value}\n")


@click.command(name="brnorm")
@add_options(_SYMBOL_OPTIONS)
@click.option("-j", "--j", "scales", default="-2:-4", show_default=True, help="Scales j.")
@click.option("-p", "--p", "p", type=float, default=4.0, show_default=True)
@click.option("-s", "--s", "s", type=float, default=2.0, show_default=True)
@click.option("--t", "t", type=float, default=1.0, show_default=True)
@click.option(
    "-w",
    "--weight",
    type=click.Choice(WeightPreset.values()),
    default=WeightPreset.NONE.value,
    show_default=True,
)
@click.option(
    "--weight-exponent", type=float, default=0.5, show_default=True, help="Power weight exponent."
)
@click.option(
    "--restarts",
    type=int,
    default=_config.power_method_restarts,
    show_default=True,
    help="Random restarts of the power method.",
)
@click.option("--seed", type=int, default=_config.default_seed, show_default=True)
@click.option("-o", "--out", type=Path, default=None, help="Output CSV file.")
@exit_on_error
def brnorm(
    domain,
    delta,
    grid,
    band,
    min_pixels,
    epsilon,
    scales,
    p,
    s,
    t,
    weight,
    weight_exponent,
    restarts,
    seed,
    out,
):
    """Norms of the single-scale operators U_j against 2^{-j/s} and N_j^gamma."""
    decomposition = _decomposition(domain, delta, grid, band, min_pixels, epsilon)
    rng = np.random.default_rng(seed)
    table = uj_norm_scan(
        decomposition,
        p,
        s,
        weight=make_weight(weight, decomposition.domain, rng, weight_exponent),
        t=t,
        scales=[int(x) for x in parse_sweep(scales, "j")],
        restarts=restarts,
        seed=seed,
    )
    emit_table(table, out, title=f"U_j norms, p={p:g}")
    if len(table) >= 2 and (table["norm"] > 0).all():
        slope = float(np.polyfit(table["j"], np.log2(table["norm"]), 1)[0])
        print(f"slope of log2 ||U_j|| in j: {slope:.4g}", file=sys.stderr)
