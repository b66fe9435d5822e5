"""Experiments on generalized Bochner-Riesz multipliers."""

import logging

import numpy as np
import pandas as pd

from mfcz.bochner.domains import DomainPreset, make_planar_domain
from mfcz.bochner.multiplier import (
    br_symbol,
    decompose_scales,
    delta_p,
    kernel_scaling,
    reconstruction_error,
    uj_norm_scan,
)
from mfcz.bochner.whitney import PLANE_DIM, partition_of_unity, whitney_cover
from mfcz.exceptions import MFCZInvalidOperation, MFCZInvalidParameter
from mfcz.experiments.base import ExperimentBase, ExperimentResult, check_sweep
from mfcz.experiments.norm_experiments import WeightPreset, make_weight
from mfcz.grid.torus import GridFunction, TorusDomain


logger = logging.getLogger(__name__)


def frequency_domain(points_per_dim, band) -> TorusDomain:
    """Planar torus whose frequency lattice spans [-band, band)^2 with points_per_dim points."""
    if not band > 0:
        raise MFCZInvalidParameter(f"band must be positive: {band}")
    try:
        return TorusDomain.from_frequency_spacing(
            PLANE_DIM, 2 * band / points_per_dim, points_per_dim
        )
    except ValueError as exc:
        raise MFCZInvalidParameter(f"invalid grid: {exc}") from exc


def build_decomposition(params):
    """Return the decomposition of the preset symbol with its cover and partition."""
    domain = frequency_domain(params["points_per_dim"], params["band"])
    region = make_planar_domain(params["domain"])
    cover = whitney_cover(region, domain, params["min_pixels"])
    partition = partition_of_unity(cover, params["epsilon"])
    symbol = br_symbol(region, params["delta"], partition=partition)
    return decompose_scales(symbol, partition)


def _check_symbol(params):
    try:
        DomainPreset(params["domain"])
    except ValueError as exc:
        choices = DomainPreset.values()
        raise MFCZInvalidParameter(f"domain must be one of {choices}") from exc
    if not params["delta"] > 0:
        raise MFCZInvalidParameter(f"delta must be positive: {params['delta']}")
    if not params["epsilon"] > 0:
        raise MFCZInvalidParameter(f"epsilon must be positive: {params['epsilon']}")
    check_sweep([params["min_pixels"]], "min_pixels", minimum=2)
    domain = frequency_domain(params["points_per_dim"], params["band"])
    make_planar_domain(params["domain"]).check_resolved(domain)


def _slope_verdict(value, target, tolerance):
    return bool(abs(value - target) <= tolerance)


class BRKernelScaling(ExperimentBase):
    """Scale counts, symbol norms and kernel norms of the single-scale pieces.

    Expected slopes in j: log2 N_j about -(n - 1), log2 ||sigma_j||_2 about 1/2 and
    log2 ||K_j||_1 about -1/2. The reconstruction sum_j 2^{j delta} U_j f plus the collar
    reproduces R_delta f.
    """

    NAME = "br-kernel-scaling"
    ANCHOR = "N_j ~ 2^{-j(n-1)}, ||sigma_j||_2 ~ 2^{j/2}, ||K_j||_1 ~ 2^{-j/2}"
    DEFAULTS = {
        "domain": DomainPreset.DISK.value,
        "delta": 1.0,
        "points_per_dim": 1024,
        "band": 1.25,
        "scales": [-8, -7, -6, -5, -4, -3],
        "min_pixels": 2,
        "epsilon": 0.1,
        "decay": 2,
        "tail_s": 1.5,
        "min_decay_lengths": 8.0,
        "trials": 2,
        "count_slope_tolerance": 0.2,
        "sigma_slope_tolerance": 0.15,
        "kernel_slope_tolerance": 0.2,
        "reconstruction_tolerance": 1e-10,
    }

    def check(self, params):
        _check_symbol(params)
        if len(params["scales"]) < 2:
            raise MFCZInvalidParameter("kernel scaling needs at least two scales")
        if not 1 <= params["tail_s"] <= 2:
            raise MFCZInvalidParameter(f"tail_s must be in [1, 2]: {params['tail_s']}")
        check_sweep([params["trials"]], "trials", minimum=0)

    def generate(self, params, rng):
        decomposition = build_decomposition(params)
        domain = decomposition.domain
        cover = decomposition.partition.cover
        report = kernel_scaling(
            decomposition,
            params["scales"],
            decay=params["decay"],
            s=params["tail_s"],
            min_decay_lengths=params["min_decay_lengths"],
        )
        errors = []
        for trial in range(params["trials"]):
            values = rng.standard_normal(domain.shape) + 1j * rng.standard_normal(domain.shape)
            error = reconstruction_error(decomposition, GridFunction(domain, values))
            errors.append({"trial": trial, "relative_error": error})
        errors = pd.DataFrame(errors, columns=["trial", "relative_error"])
        low, high = cover.comparability_constants()
        max_error = float(errors["relative_error"].max()) if len(errors) else 0.0
        return ExperimentResult(
            tables={
                "kernels": report.table,
                "counts": cover.count_table(),
                "derivatives": decomposition.partition.derivative_table(),
                "reconstruction": errors,
            },
            results={
                "count_slope": report.count_slope,
                "sigma_slope": report.sigma_slope,
                "kernel_l1_slope": report.kernel_l1_slope,
                "tail_linf_slope": report.tail_linf_slope,
                "num_cubes": len(cover),
                "num_collar_cubes": cover.num_collar_cubes,
                "comparability": [low, high],
                "collar_mass": decomposition.collar_mass(),
                "exactness_error": decomposition.exactness_error(),
                "max_reconstruction_error": max_error,
            },
            verdicts={
                "count_slope": _slope_verdict(
                    report.count_slope, -(PLANE_DIM - 1), params["count_slope_tolerance"]
                ),
                "sigma_slope": _slope_verdict(
                    report.sigma_slope, 0.5, params["sigma_slope_tolerance"]
                ),
                "kernel_l1_slope": _slope_verdict(
                    report.kernel_l1_slope, -0.5, params["kernel_slope_tolerance"]
                ),
                "reconstruction": bool(max_error <= params["reconstruction_tolerance"]),
            },
        )


class BRNormScan(ExperimentBase):
    """Norms of the single-scale operators U_j against 2^{-j(n-1)/s} and N_j^gamma."""

    NAME = "br-norm-scan"
    ANCHOR = "||U_j||_{L^p(w)} <~ 2^{-j(n-1)/s} through the multi-frequency bound with N = N_j"
    DEFAULTS = {
        "domain": DomainPreset.DISK.value,
        "delta": 1.0,
        "points_per_dim": 128,
        "band": 1.25,
        "scales": [-4, -3, -2],
        "min_pixels": 2,
        "epsilon": 0.1,
        "p": 4.0,
        "s": 2.0,
        "t": 1.0,
        "weight": WeightPreset.NONE.value,
        "weight_exponent": 0.5,
        "high": 10.0,
        "restarts": 2,
        "slope_slack": 0.25,
    }

    def check(self, params):
        _check_symbol(params)
        if not 1 < params["p"] < np.inf:
            raise MFCZInvalidParameter(f"p must be in (1, inf): {params['p']}")
        if not params["s"] >= 1 or not params["t"] >= 1:
            raise MFCZInvalidParameter("need s >= 1 and t >= 1")
        try:
            WeightPreset(params["weight"])
        except ValueError as exc:
            raise MFCZInvalidParameter(f"unknown weight {params['weight']!r}") from exc
        check_sweep([params["restarts"]], "restarts", minimum=0)

    def generate(self, params, rng):
        decomposition = build_decomposition(params)
        weight = make_weight(
            params["weight"],
            decomposition.domain,
            rng,
            params["weight_exponent"],
            params["high"],
        )
        table = uj_norm_scan(
            decomposition,
            params["p"],
            params["s"],
            weight=weight,
            t=params["t"],
            scales=params["scales"],
            restarts=params["restarts"],
            seed=int(rng.integers(2**31)),
        )
        results = {"slope": None}
        verdicts = {}
        positive = table[table["norm"] > 0] if len(table) else table
        if len(positive) >= 2:
            slope = float(np.polyfit(positive["j"], np.log2(positive["norm"]), 1)[0])
            floor = -(PLANE_DIM - 1) / params["s"]
            results["slope"] = slope
            results["scale_exponent"] = floor
            verdicts["scale_growth"] = bool(slope >= floor - params["slope_slack"])
        if len(table):
            results["max_scale_ratio"] = float(table["scale_ratio"].max())
            results["max_mfcz_ratio"] = float(table["mfcz_ratio"].max())
        return ExperimentResult(tables={"norms": table}, results=results, verdicts=verdicts)


class DeltaPTable(ExperimentBase):
    """The Bochner-Riesz exponent delta(p) reached by the single-scale estimates."""

    NAME = "delta-p-table"
    ANCHOR = "delta(p) = max{n |1/2 - 1/p| - 1/2, 0}; n = 2 gives 0, 0, 1/2 at p = 2, 4, inf"
    DEFAULTS = {
        "dims": [2, 3, 4],
        "exponents": [1.0, 1.2, 1.5, 2.0, 3.0, 4.0, 6.0, float("inf")],
    }
    EXPECTED = {2.0: 0.0, 4.0: 0.0, float("inf"): 0.5}

    def check(self, params):
        check_sweep(params["dims"], "dims", minimum=2)
        check_sweep(params["exponents"], "exponents", minimum=1.0)

    def generate(self, params, rng):
        rows = []
        for n in params["dims"]:
            for p in params["exponents"]:
                try:
                    value, available = delta_p(n, p), True
                except MFCZInvalidOperation:
                    value, available = float("nan"), False
                rows.append({"n": n, "p": p, "delta_p": value, "available": available})
        table = pd.DataFrame(rows)
        planar = {p: delta_p(2, p) for p in self.EXPECTED}
        return ExperimentResult(
            tables={"delta_p": table},
            results={"planar_reference": {str(k): v for k, v in planar.items()}},
            verdicts={"planar_values": all(planar[p] == v for p, v in self.EXPECTED.items())},
        )
