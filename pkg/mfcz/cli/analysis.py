"""CLI commands that run one numerical operation on user-supplied input."""

import logging
import sys
from pathlib import Path

import click
import numpy as np
import pandas as pd

from mfcz.cli.common import (
    add_options,
    emit_report,
    emit_table,
    exit_on_error,
    load_theta,
    parse_sweep,
    theta_prefix,
)
from mfcz.decomposition.cz_decomposition import decompose
from mfcz.exceptions import MFCZInvalidParameter
from mfcz.experiments.base import make_domain
from mfcz.experiments.models import parse_assignment
from mfcz.grid.box_family import BoxFamily
from mfcz.grid.serialization import read_grid_function, write_grid_function
from mfcz.grid.torus import Box
from mfcz.mfcz_rc import MfczRuntimeConfig
from mfcz.norms.envelopes import envelope_table
from mfcz.norms.power_method import growth_regression
from mfcz.operators.multifreq_operator import (
    BumpFamily,
    OperatorPreset,
    bump_family_cubes,
    make_operator,
)
from mfcz.operators.symbols import HormanderProfile, bump_constant
from mfcz.sharp.sharp_maximal import (
    ProjectionMode,
    ProjectionRegion,
    SharpMaxConfig,
    fefferman_stein_ratio,
    projection_sup_ratio,
    sharp_maximal,
)
from mfcz.span.span_constant import compute_span_constant
from mfcz.weights.characteristics import (
    a1_characteristic,
    ap_characteristic,
    depth_growth,
    jn_identity_check,
    rh_characteristic,
    weight_class_report,
)
from mfcz.weights.weight import Weight


logger = logging.getLogger(__name__)
_config = MfczRuntimeConfig.load()

_THETA_OPTION = click.option(
    "-t",
    "--theta",
    required=True,
    help="Frequency set: arith:N[:step], random:N:seed[:width], cluster:N:eps or a CSV file.",
)
_INPUT_OPTION = click.option(
    "-i",
    "--in",
    "input_file",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Grid function file (.csv or .bin).",
)
_OPERATOR_OPTIONS = (
    click.option(
        "--op",
        type=click.Choice(OperatorPreset.values()),
        default=OperatorPreset.MF_HILBERT.value,
        show_default=True,
        help="Operator preset.",
    ),
    click.option(
        "--profile",
        type=click.Choice(HormanderProfile.values()),
        default=HormanderProfile.ODD.value,
        show_default=True,
        help="Profile of the hormander preset.",
    ),
)


def _read_weight(filename) -> Weight:
    f = read_grid_function(filename)
    if not f.is_real:
        raise MFCZInvalidParameter(f"weight file {filename} has complex values")
    return Weight(f.domain, np.real(f.values), name=Path(filename).stem)


def parse_family(text, domain) -> BoxFamily:
    """Build a dyadic family from ``depth=8,shifted=true,min_pixels=1`` (all keys optional)."""
    kwargs = {}
    for item in filter(None, (x.strip() for x in text.split(","))):
        key, value = parse_assignment(item)
        if key not in ("depth", "shifted", "min_pixels"):
            raise MFCZInvalidParameter(f"unknown family option {key!r}")
        kwargs[key] = value
    return BoxFamily.dyadic(domain, **kwargs)


@click.command(name="lemma-const")
@_THETA_OPTION
@click.option("-p", "--p", "p", type=float, default=2.0, show_default=True, help="Exponent.")
@click.option(
    "-N", "--N-sweep", "n_sweep", default="1:16", show_default=True, help="Values of N."
)
@click.option(
    "--grid", type=int, default=2048, show_default=True, help="Grid points per dimension."
)
@click.option(
    "--box-points",
    type=int,
    default=512,
    show_default=True,
    help="Radius of 3Q in grid points; Q is centered in the torus.",
)
@click.option(
    "--multi-start-count",
    type=int,
    default=_config.multi_start_count,
    show_default=True,
    help="Starts of the optimization for p < 2.",
)
@click.option("--seed", type=int, default=_config.default_seed, show_default=True)
@click.option("-o", "--out", type=Path, default=None, help="Output CSV file.")
@exit_on_error
def lemma_const(theta, p, n_sweep, grid, box_points, multi_start_count, seed, out):
    """Span constants of the first N frequencies of THETA.

    \b
    Example:
    $ mfcz lemma-const --theta arith:64:0.1 --p 2 --N-sweep 1:64 --out lemma.csv
    """
    frequencies = load_theta(theta, seed=seed)
    domain = make_domain(frequencies.dim, grid)
    h = domain.spacing
    box = Box((grid // 2 * h,) * domain.dim, box_points * h / 3)
    rows = []
    for count in parse_sweep(n_sweep, "N-sweep"):
        result = compute_span_constant(
            theta_prefix(frequencies, int(count)),
            box,
            p,
            domain,
            multi_start_count=multi_start_count,
            seed=seed,
        )
        rows.append(
            {
                "N": int(count),
                "p": p,
                "constant": result.value,
                "ratio_to_N_pow": result.ratio_to_envelope,
                "lower_bound_only": result.lower_bound_only,
            }
        )
    emit_table(pd.DataFrame(rows), out, title="Span constants")


@click.command(name="apply")
@add_options(_OPERATOR_OPTIONS)
@_THETA_OPTION
@_INPUT_OPTION
@click.option("-o", "--out", type=Path, required=True, help="Output grid function file.")
@exit_on_error
def apply_command(op, profile, theta, input_file, out):
    """Apply a multi-frequency operator to a grid function.

    \b
    Example:
    $ mfcz apply --op mfhilbert --theta arith:8:4 --in f.csv --out g.csv
    """
    f = read_grid_function(input_file)
    operator = make_operator(op, load_theta(theta), profile=profile)
    write_grid_function(operator.apply(f), out)
    print(f"Wrote {out}", file=sys.stderr)


@click.command(name="decompose")
@_INPUT_OPTION
@click.option("-l", "--lambda", "lam", type=float, required=True, help="Height lambda.")
@_THETA_OPTION
@click.option("--min-pixels", type=int, default=1, show_default=True, help="Smallest box side.")
@click.option("-a", "--audit", type=Path, default=None, help="Output JSON file.")
@exit_on_error
def decompose_command(input_file, lam, theta, min_pixels, audit):
    """Multi-frequency Calderon-Zygmund decomposition of a grid function at height lambda."""
    f = read_grid_function(input_file)
    decomposition = decompose(f, lam, load_theta(theta), min_pixels=min_pixels)
    emit_report(decomposition.to_report(), audit)


_SHARP_OPTIONS = (
    _INPUT_OPTION,
    _THETA_OPTION,
    click.option("-s", "--s", "s", type=float, default=2.0, show_default=True, help="Exponent."),
    click.option("--min-pixels", type=int, default=1, show_default=True),
    click.option(
        "--mode",
        type=click.Choice(ProjectionMode.values()),
        default=ProjectionMode.L2.value,
        show_default=True,
        help="Projection onto the span.",
    ),
    click.option(
        "--region",
        type=click.Choice(ProjectionRegion.values()),
        default=ProjectionRegion.TRIPLED.value,
        show_default=True,
        help="Region on which f 1_Q is approximated.",
    ),
)


def _sharp_config(input_file, theta, s, min_pixels, mode, region):
    f = read_grid_function(input_file)
    cfg = SharpMaxConfig.dyadic(
        load_theta(theta), f.domain, s=s, min_pixels=min_pixels, mode=mode, region=region
    )
    if cfg.approximate:
        logger.warning("The ls projection at s=%s is approximate", s)
    return f, cfg


@click.command(name="sharpmax")
@add_options(_SHARP_OPTIONS)
@click.option("-o", "--out", type=Path, required=True, help="Output grid function file.")
@exit_on_error
def sharpmax_command(input_file, theta, s, min_pixels, mode, region, out):
    """Maximal sharp function M#_{s,Theta} f over the shifted dyadic family."""
    f, cfg = _sharp_config(input_file, theta, s, min_pixels, mode, region)
    write_grid_function(sharp_maximal(f, cfg), out)
    print(f"Wrote {out}", file=sys.stderr)


@click.command(name="fs-ratio")
@add_options(_SHARP_OPTIONS)
@click.option("-p", "--p", "p", type=float, default=4.0, show_default=True, help="Exponent > s.")
@click.option("--t", "t", type=float, default=1.0, show_default=True)
@click.option(
    "-w",
    "--weight",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Weight grid function file.",
)
@click.option("-o", "--out", type=Path, default=None, help="Output JSON file.")
@exit_on_error
def fs_ratio_command(input_file, theta, s, min_pixels, mode, region, p, t, weight, out):
    """Compare ||f||_{L^p(w)} with the L^p(w) norm of its maximal sharp function."""
    f, cfg = _sharp_config(input_file, theta, s, min_pixels, mode, region)
    report = fefferman_stein_ratio(
        f, cfg, p, weight=None if weight is None else _read_weight(weight), t=t
    )
    data = report.serialize()
    data["projection_sup"] = projection_sup_ratio(f, cfg).serialize()
    emit_report(data, out)


@click.command(name="weights")
@click.option(
    "-i",
    "--in",
    "input_file",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Weight grid function file (.csv or .bin).",
)
@click.option("-p", "--p", "p", type=float, default=3.0, show_default=True)
@click.option("-s", "--s", "s", type=float, default=2.0, show_default=True)
@click.option("--t", "t", type=float, default=1.0, show_default=True)
@click.option(
    "-F",
    "--family",
    default="",
    show_default=True,
    help="Dyadic family options, e.g. depth=8,shifted=false,min_pixels=2.",
)
@click.option("--threshold", type=float, default=1e6, show_default=True)
@click.option("-o", "--out", type=Path, default=None, help="Output JSON file.")
@exit_on_error
def weights_command(input_file, p, s, t, family, threshold, out):
    """Characteristics of a weight for the class A_{p/s} and RH_{t'}."""
    weight = _read_weight(input_file)
    boxes = parse_family(family, weight.domain)
    data = {
        "class": weight_class_report(weight, p, s, t, boxes, threshold).serialize(),
        "depth_slopes": {
            "ap": depth_growth(weight, ap_characteristic, p=p / s).attrs["slope"],
            "a1": depth_growth(weight, a1_characteristic).attrs["slope"],
        },
    }
    if t > 1:
        rh = depth_growth(weight, rh_characteristic, s=t / (t - 1))
        data["depth_slopes"]["rh"] = rh.attrs["slope"]
    if p / s > 1 and s > 1:
        data["power_identity"] = jn_identity_check(weight, p / s, s, boxes, threshold).serialize()
    emit_report(data, out)


@click.command(name="normscan")
@add_options(_OPERATOR_OPTIONS)
@_THETA_OPTION
@click.option("-p", "--p", "p", type=float, default=4.0, show_default=True)
@click.option(
    "-N", "--N-sweep", "n_sweep", default="2,4,8,16", show_default=True, help="Values of N."
)
@click.option(
    "--grid",
    type=int,
    default=512,
    show_default=True,
    help="Grid points per dimension; ignored with --weight.",
)
@click.option(
    "-w",
    "--weight",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Weight grid function file.",
)
@click.option("--t", "t", type=float, default=None, help="RH_{t'} parameter of the weight.")
@click.option("-s", "--s", "s", type=float, default=None, help="A_{p/s} parameter.")
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
def normscan_command(op, profile, theta, p, n_sweep, grid, weight, t, s, restarts, seed, out):
    """Estimate ||T||_{L^p(w)} over an N sweep and fit the growth in N."""
    frequencies = load_theta(theta, seed=seed)
    if weight is None:
        domain, weight_obj = make_domain(frequencies.dim, grid), None
    else:
        weight_obj = _read_weight(weight)
        domain = weight_obj.domain
    thetas = [theta_prefix(frequencies, int(x)) for x in parse_sweep(n_sweep, "N-sweep")]
    report = growth_regression(
        lambda x: make_operator(op, x, profile=profile),
        thetas,
        domain,
        p,
        weight=weight_obj,
        t=t,
        s=s,
        restarts=restarts,
        seed=seed,
    )
    emit_table(report.table, out, title=f"{op} norms, p={p:g}")
    if report.fit is not None:
        print(
            f"fitted exponent {report.fit.exponent:.4g}, envelope exponent "
            f"{report.exponent:.4g}, within envelope: {report.within_envelope}",
            file=sys.stderr,
        )
    if t is not None and s is not None:
        emit_table(envelope_table(p, t, s), title="Envelope exponents")


@click.command(name="bump-constant")
@click.option(
    "-F",
    "--family",
    type=click.Choice(BumpFamily.values()),
    default=BumpFamily.EQUAL.value,
    show_default=True,
)
@click.option(
    "-N", "--N-sweep", "n_sweep", default="1:32", show_default=True, help="Values of N."
)
@click.option("-n", "--dim", type=int, default=1, show_default=True, help="Dimension n.")
@click.option("--decay", type=float, default=None, help="Decay exponent M; defaults to n + 2.")
@click.option("-o", "--out", type=Path, default=None, help="Output CSV file.")
@exit_on_error
def bump_constant_command(family, n_sweep, dim, decay, out):
    """C(r_1, ..., r_N) for a family of cube radii."""
    rows = []
    for count in parse_sweep(n_sweep, "N-sweep"):
        radii = [x.radius for x in bump_family_cubes(family, int(count), dim=dim)]
        rows.append({"N": int(count), "constant": bump_constant(radii, dim, decay)})
    emit_table(pd.DataFrame(rows), out, title=f"Bump constants, {family} radii")
