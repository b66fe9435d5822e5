"""Experiments on the maximal sharp function."""

import logging

import numpy as np
import pandas as pd

from mfcz.common import RATIO_DENOMINATOR_FLOOR
from mfcz.exceptions import MFCZInvalidParameter
from mfcz.experiments.base import (
    ExperimentBase,
    ExperimentResult,
    centered_lattice_theta,
    check_sweep,
    fit_or_none,
    make_domain,
)
from mfcz.experiments.decomposition_experiments import mf_hilbert_operator
from mfcz.frequency.freqset import FrequencySet
from mfcz.grid.torus import GridFunction
from mfcz.norms.envelopes import pointwise_exponent
from mfcz.sharp.sharp_maximal import (
    SharpMaxConfig,
    classical_sharp,
    fefferman_stein_ratio,
    pointwise_domination,
    projection_sup_ratio,
    sharp_maximal,
)


logger = logging.getLogger(__name__)


def _random_function(domain, rng):
    return GridFunction(domain, rng.standard_normal(domain.shape))


def _check_common(params):
    if not 1 < params["s"] < np.inf:
        raise MFCZInvalidParameter(f"s must be in (1, inf): {params['s']}")
    check_sweep(params["counts"], "counts")
    check_sweep([params["trials"]], "trials")
    domain = make_domain(1, params["points_per_dim"])
    for count in params["counts"]:
        centered_lattice_theta(count, params["spacing"], domain)


class SharpMaxFeffermanStein(ExperimentBase):
    """Classical reduction of the sharp function and the Fefferman-Stein type inequality.

    With theta = {0} the span is the constants and M#_{s} fits f 1_Q by a constant on 3Q, which
    stays within classical_factor of the classical sharp function. For larger sets the
    experiment measures ||f||_p / ||M# f||_p and sup_Q ||pr_Q(f 1_Q)||_inf^s / avg_Q |f|^s
    against their envelopes.
    """

    NAME = "sharpmax-fs"
    ANCHOR = "||f||_{L^p(w)} <~ N^{(tp/s) max{1/2, 1/s}} ||M#_{s,Theta} f||_{L^p(w)}"
    DEFAULTS = {
        "points_per_dim": 256,
        "trials": 100,
        "s": 2.0,
        "p": 4.0,
        "counts": [1, 2, 4, 8, 16],
        "spacing": 4,
        "min_pixels": 1,
        "fs_trials": 5,
        "classical_factor": 2.0,
        "fs_bound": 10.0,
    }

    def check(self, params):
        _check_common(params)
        if not params["p"] > params["s"]:
            raise MFCZInvalidParameter(f"p must exceed s: p={params['p']}, s={params['s']}")
        check_sweep([params["fs_trials"], params["min_pixels"]], "fs_trials")

    def generate(self, params, rng):
        domain = make_domain(1, params["points_per_dim"])
        s = params["s"]
        constants = SharpMaxConfig.dyadic(
            FrequencySet([0.0]), domain, s=s, min_pixels=params["min_pixels"]
        )
        classical_rows = []
        for trial in range(params["trials"]):
            f = _random_function(domain, rng)
            sharp = sharp_maximal(f, constants).values
            classical = classical_sharp(f, constants.family, s).values
            floor = RATIO_DENOMINATOR_FLOOR * float(np.max(classical))
            valid = (classical > floor) & (sharp > floor)
            ratio = sharp[valid] / classical[valid]
            classical_rows.append(
                {
                    "trial": trial,
                    "min_ratio": float(ratio.min()),
                    "max_ratio": float(ratio.max()),
                    "factor": float(max(ratio.max(), 1 / ratio.min())),
                }
            )
        classical_table = pd.DataFrame(classical_rows)

        fs_rows = []
        for count in params["counts"]:
            theta = centered_lattice_theta(count, params["spacing"], domain)
            cfg = SharpMaxConfig.dyadic(theta, domain, s=s, min_pixels=params["min_pixels"])
            for trial in range(params["fs_trials"]):
                f = _random_function(domain, rng)
                report = fefferman_stein_ratio(f, cfg, params["p"])
                sup = projection_sup_ratio(f, cfg)
                fs_rows.append(
                    {
                        "N": count,
                        "trial": trial,
                        "f_norm": report.f_norm,
                        "sharp_norm": report.sharp_norm,
                        "ratio": np.nan if report.ratio is None else report.ratio,
                        "envelope": report.envelope,
                        "scaled_ratio": (
                            np.nan if report.ratio is None else report.ratio / report.envelope
                        ),
                        "projection_sup": sup.value,
                        "projection_envelope": sup.envelope,
                    }
                )
        fs_table = pd.DataFrame(fs_rows)
        worst = float(fs_table["scaled_ratio"].max())
        return ExperimentResult(
            tables={"classical": classical_table, "fefferman_stein": fs_table},
            results={
                "classical_max_factor": float(classical_table["factor"].max()),
                "fs_max_scaled_ratio": worst,
                "degenerate": int(fs_table["ratio"].isna().sum()),
            },
            verdicts={
                "classical_match": bool(
                    classical_table["factor"].max() <= params["classical_factor"]
                ),
                "fs_bounded": bool(worst <= params["fs_bound"]),
            },
        )


class PointwiseDomination(ExperimentBase):
    """sup_x M#_{s,Theta}(T f)(x) / M_s f(x) for the multi-frequency Hilbert transform."""

    NAME = "pointwise-dom"
    ANCHOR = "M#_{s,Theta}(T f) <~ N^{|1/s - 1/2|} M_s f pointwise"
    DEFAULTS = {
        "points_per_dim": 256,
        "counts": [1, 2, 4, 8, 16, 32],
        "spacing": 4,
        "s": 2.0,
        "trials": 3,
        "min_pixels": 1,
        "ratio_bound": 100.0,
        "slope_slack": 0.25,
    }

    def check(self, params):
        _check_common(params)

    def generate(self, params, rng):
        domain = make_domain(1, params["points_per_dim"])
        s = params["s"]
        exponent = pointwise_exponent(s)
        rows = []
        for count in params["counts"]:
            theta = centered_lattice_theta(count, params["spacing"], domain)
            cfg = SharpMaxConfig.dyadic(theta, domain, s=s, min_pixels=params["min_pixels"])
            operator = mf_hilbert_operator(theta)
            for trial in range(params["trials"]):
                report = pointwise_domination(operator, _random_function(domain, rng), cfg)
                rows.append(
                    {
                        "N": count,
                        "trial": trial,
                        "ratio": report.ratio,
                        "envelope": report.envelope,
                    }
                )
        table = pd.DataFrame(rows)
        maxima = table.groupby("N", as_index=False)["ratio"].max()
        fit = fit_or_none(maxima["N"], maxima["ratio"], variable="N", envelope=exponent)
        verdicts = {"bounded": bool(maxima["ratio"].max() <= params["ratio_bound"])}
        if fit is not None and not fit.degenerate:
            verdicts["flat"] = bool(fit.exponent <= exponent + params["slope_slack"])
        return ExperimentResult(
            tables={"ratios": table, "ratio_max": maxima},
            results={
                "exponent": exponent,
                "max_ratio": float(maxima["ratio"].max()),
                "fit": None if fit is None else fit.serialize(),
            },
            verdicts=verdicts,
        )
