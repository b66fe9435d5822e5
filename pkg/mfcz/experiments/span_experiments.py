"""Experiments on exponential spans and sumsets."""

import logging

import numpy as np
import pandas as pd

from mfcz.common import DEFAULT_SUMSET_CAP
from mfcz.exceptions import MFCZCardinalityError, MFCZGramError, MFCZInvalidParameter
from mfcz.experiments.base import ExperimentBase, ExperimentResult, check_sweep, make_domain
from mfcz.frequency.freqset import FrequencySet, arithmetic_set, sumset, sumset_growth_table
from mfcz.grid.torus import Box
from mfcz.span.span_constant import compute_span_constant


logger = logging.getLogger(__name__)


class LemmaSweep(ExperimentBase):
    """Span constants for orthogonal and generic frequency sets over an N sweep.

    Q is centered at a grid point and 3Q holds 2K + 1 grid points, K = box_points. The
    orthogonal sets are multiples of 2 pi / ((2K + 1) h), which are orthogonal under the grid
    quadrature on 3Q; the generic sets are uniform random in [0, width_factor N step).
    """

    NAME = "lemma-sweep"
    ANCHOR = "sup_Q |phi| <~ (#Theta)^(1/p) (avg_3Q |phi|^p)^(1/p) over exponential spans"
    DEFAULTS = {
        "orthogonal_counts": list(range(1, 65)),
        "generic_counts": [2, 4, 8, 16, 32, 64],
        "trials": 20,
        "p": 2.0,
        "points_per_dim": 2048,
        "box_points": 512,
        "width_factor": 4.0,
        "multi_start_count": 8,
        "orthogonal_tolerance": 1e-9,
        "ratio_bound": 4.0,
    }

    def check(self, params):
        if not 1 <= params["p"] <= 2:
            raise MFCZInvalidParameter(f"p must be in [1, 2]: {params['p']}")
        check_sweep(params["orthogonal_counts"], "orthogonal_counts")
        check_sweep(params["generic_counts"], "generic_counts")
        check_sweep([params["trials"]], "trials")
        if 2 * params["box_points"] > params["points_per_dim"]:
            raise MFCZInvalidParameter("3Q must fit in half the torus: 2 box_points <= M")
        largest = max(params["orthogonal_counts"] + params["generic_counts"])
        if 16 * largest > 2 * params["box_points"] + 1:
            raise MFCZInvalidParameter(
                f"3Q needs 16 points per frequency; raise box_points for N = {largest}"
            )

    def generate(self, params, rng):
        domain = make_domain(1, params["points_per_dim"])
        k = params["box_points"]
        h = domain.spacing
        box = Box((domain.points_per_dim // 2 * h,), k * h / 3)
        step = 2 * np.pi / ((2 * k + 1) * h)
        p = params["p"]
        kwargs = {"multi_start_count": params["multi_start_count"]}

        orthogonal_rows = []
        for count in params["orthogonal_counts"]:
            theta = arithmetic_set(count, step=step, start=0.0)
            result = compute_span_constant(theta, box, p, domain, **kwargs)
            orthogonal_rows.append(
                {
                    "N": count,
                    "constant": result.value,
                    "envelope": result.envelope,
                    "relative_error": abs(result.value / result.envelope - 1),
                }
            )
        orthogonal = pd.DataFrame(orthogonal_rows)

        generic_rows = []
        failures = 0
        for count in params["generic_counts"]:
            for trial in range(params["trials"]):
                width = params["width_factor"] * count * step
                theta = FrequencySet(rng.uniform(0.0, width, size=count))
                seed = int(rng.integers(2**31))
                try:
                    result = compute_span_constant(theta, box, p, domain, seed=seed, **kwargs)
                except MFCZGramError as exc:
                    failures += 1
                    logger.warning("Skipping N=%s trial %s: %s", count, trial, exc)
                    continue
                generic_rows.append(
                    {
                        "N": count,
                        "trial": trial,
                        "constant": result.value,
                        "ratio_to_N_pow": result.ratio_to_envelope,
                        "condition_estimate": result.condition_estimate,
                        "lower_bound_only": result.lower_bound_only,
                    }
                )
        generic = pd.DataFrame(generic_rows)
        maxima = generic.groupby("N", as_index=False)["ratio_to_N_pow"].max()

        result = ExperimentResult(
            tables={"orthogonal": orthogonal, "generic": generic, "generic_max": maxima}
        )
        max_ratio = float(maxima["ratio_to_N_pow"].max()) if len(maxima) else float("nan")
        result.results = {
            "orthogonal_max_error": float(orthogonal["relative_error"].max()),
            "generic_max_ratio": max_ratio,
            "gram_failures": failures,
        }
        if p == 2:
            result.verdicts["orthogonal_exact"] = bool(
                orthogonal["relative_error"].max() <= params["orthogonal_tolerance"]
            )
        result.verdicts["generic_bounded"] = bool(max_ratio <= params["ratio_bound"])
        return result


class SumsetTable(ExperimentBase):
    """Cardinalities of iterated sumsets of arithmetic and random frequency sets."""

    NAME = "sumset-table"
    ANCHOR = "#Theta^k = k(N - 1) + 1 for an arithmetic progression of N frequencies"
    DEFAULTS = {
        "counts": list(range(2, 65)),
        "k_max": 6,
        "random_counts": [4, 8, 16, 32],
        "random_k_max": 3,
        "sumset_cap": DEFAULT_SUMSET_CAP,
    }

    def check(self, params):
        check_sweep(params["counts"], "counts")
        check_sweep([params["k_max"], params["random_k_max"]], "k_max")

    def generate(self, params, rng):
        frames = []
        for count in params["counts"]:
            table = sumset_growth_table(
                arithmetic_set(count), params["k_max"], params["sumset_cap"]
            )
            table.insert(0, "N", count)
            frames.append(table)
        arithmetic = pd.concat(frames, ignore_index=True)
        arithmetic["exact"] = arithmetic["cardinality"] == arithmetic["arithmetic_count"]

        rows = []
        for count in params["random_counts"]:
            theta = FrequencySet(rng.uniform(0.0, 1.0, size=count))
            for k in range(1, params["random_k_max"] + 1):
                try:
                    size = sumset(theta, k, cap=params["sumset_cap"]).size
                except MFCZCardinalityError as exc:
                    logger.warning("Stopping the random sumset at N=%s k=%s: %s", count, k, exc)
                    break
                rows.append({"N": count, "k": k, "cardinality": size})
        generic = pd.DataFrame(rows, columns=["N", "k", "cardinality"])

        return ExperimentResult(
            tables={"arithmetic": arithmetic, "random": generic},
            results={"rows": len(arithmetic), "mismatches": int((~arithmetic["exact"]).sum())},
            verdicts={"arithmetic_exact": bool(arithmetic["exact"].all())},
        )
