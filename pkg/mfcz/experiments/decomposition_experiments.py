"""Experiments on the multi-frequency Calderon-Zygmund decomposition and weak-type bounds."""

import logging

import numpy as np
import pandas as pd

from mfcz.decomposition.cz_decomposition import decompose
from mfcz.decomposition.weak_type import WeakTypeFamily, weak11_experiment
from mfcz.exceptions import MFCZInvalidParameter
from mfcz.experiments.base import (
    ExperimentBase,
    ExperimentResult,
    centered_lattice_theta,
    check_sweep,
    fit_or_none,
    make_domain,
)
from mfcz.grid.torus import GridFunction, lp_norm
from mfcz.operators.multifreq_operator import operator_from_symbol
from mfcz.operators.symbols import mf_hilbert_symbol


logger = logging.getLogger(__name__)

AUDIT_CONSTANTS = ("c1", "c2", "c3", "c4")


def mf_hilbert_operator(theta):
    return operator_from_symbol(mf_hilbert_symbol(theta), theta)


class CZDecompositionAudit(ExperimentBase):
    """Decompose random functions over a lambda and N sweep and audit every decomposition.

    lambda is lambda_factor * sqrt(N) * avg |f|, so the stopping threshold lambda / sqrt(N)
    is lambda_factor times the mean of |f|.
    """

    NAME = "czdecomp-audit"
    ANCHOR = "f = g + sum b_J with int b_J e^{-i xi y} = 0, sum |J| <~ sqrt(N) ||f||_1 / lambda"
    DEFAULTS = {
        "dim": 1,
        "points_per_dim": 256,
        "counts": [1, 2, 4, 8, 16, 32, 64],
        "spacing": 2,
        "trials": 50,
        "lambda_factors": [2.0, 4.0, 8.0],
        "min_pixels": 1,
        "complex_values": False,
        "reconstruction_tolerance": 1e-10,
        "cancellation_tolerance": 1e-8,
        "audit_bound": 64.0,
    }

    def check(self, params):
        if params["dim"] not in (1, 2):
            raise MFCZInvalidParameter(f"dim must be 1 or 2: {params['dim']}")
        check_sweep(params["counts"], "counts")
        check_sweep(params["lambda_factors"], "lambda_factors", minimum=1.0)
        check_sweep([params["trials"], params["min_pixels"], params["spacing"]], "trials")
        domain = make_domain(params["dim"], params["points_per_dim"])
        for count in params["counts"]:
            centered_lattice_theta(count, params["spacing"], domain)

    def generate(self, params, rng):
        domain = make_domain(params["dim"], params["points_per_dim"])
        rows = []
        for count in params["counts"]:
            theta = centered_lattice_theta(count, params["spacing"], domain)
            for trial in range(params["trials"]):
                values = rng.standard_normal(domain.shape)
                if params["complex_values"]:
                    values = values + 1j * rng.standard_normal(domain.shape)
                f = GridFunction(domain, values)
                mean = lp_norm(f, 1) / domain.measure
                for factor in params["lambda_factors"]:
                    lam = factor * np.sqrt(count) * mean
                    audit = decompose(f, lam, theta, params["min_pixels"]).audit
                    row = {"N": count, "trial": trial, "lambda_factor": factor, "lambda": lam}
                    row.update(audit.dict())
                    rows.append(row)
        table = pd.DataFrame(rows)
        maxima = table.groupby("N", as_index=False)[
            list(AUDIT_CONSTANTS) + ["good_part_constant"]
        ].max()
        slopes = {}
        for name in AUDIT_CONSTANTS:
            fit = fit_or_none(maxima["N"], maxima[name], variable="N", envelope=0.0)
            slopes[name] = None if fit is None else fit.exponent
        bound = params["audit_bound"]
        return ExperimentResult(
            tables={"audit": table, "audit_max": maxima},
            results={
                "max_reconstruction_error": float(table["reconstruction_error"].max()),
                "max_cancellation_residual": float(table["max_cancellation_residual"].max()),
                "max_constants": {x: float(maxima[x].max()) for x in AUDIT_CONSTANTS},
                "constant_slopes": slopes,
            },
            verdicts={
                "reconstruction": bool(
                    table["reconstruction_error"].max() <= params["reconstruction_tolerance"]
                ),
                "cancellation": bool(
                    table["max_cancellation_residual"].max() <= params["cancellation_tolerance"]
                ),
                "constants_bounded": bool(
                    all(maxima[x].max() <= bound for x in AUDIT_CONSTANTS)
                ),
            },
        )


class Weak11Scan(ExperimentBase):
    """Weak-type (1,1) ratios of the multi-frequency Hilbert transform over an N sweep."""

    NAME = "weak11-scan"
    ANCHOR = "sup_lambda lambda |{|T f| > lambda}| <~ sqrt(N) ||f||_1"
    DEFAULTS = {
        "points_per_dim": 4096,
        "counts": [2, 4, 8, 16, 32, 64],
        "spacing": 8,
        "families": WeakTypeFamily.values(),
        "slope_low": 0.3,
        "slope_high": 0.65,
    }

    def check(self, params):
        check_sweep(params["counts"], "counts", min_length=4)
        domain = make_domain(1, params["points_per_dim"])
        for count in params["counts"]:
            centered_lattice_theta(count, params["spacing"], domain)
        for family in params["families"]:
            try:
                WeakTypeFamily(family)
            except ValueError as exc:
                raise MFCZInvalidParameter(f"unknown test family {family!r}") from exc
        if not 0 <= params["slope_low"] <= params["slope_high"]:
            raise MFCZInvalidParameter("need 0 <= slope_low <= slope_high")

    def generate(self, params, rng):
        domain = make_domain(1, params["points_per_dim"])
        thetas = [
            centered_lattice_theta(x, params["spacing"], domain) for x in params["counts"]
        ]
        report = weak11_experiment(
            mf_hilbert_operator,
            thetas,
            domain,
            families=params["families"],
            seed=int(rng.integers(2**31)),
            band=(params["slope_low"], params["slope_high"]),
        )
        fit = report.fit
        return ExperimentResult(
            tables={"ratios": report.table, "ratio_max": report.maxima},
            results={
                "fit": None if fit is None else fit.serialize(),
                "lower_side_met": report.lower_side_met,
            },
            verdicts={"upper_side": report.upper_side_met},
        )
