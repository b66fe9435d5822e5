"""Experiments on operator norms of multi-frequency operators."""

import logging

import numpy as np
import pandas as pd

from mfcz.data_models import MFCZEnum
from mfcz.exceptions import MFCZInvalidParameter
from mfcz.experiments.base import (
    ExperimentBase,
    ExperimentResult,
    centered_lattice_theta,
    check_sweep,
    clustered_lattice_theta,
    make_domain,
    random_lattice_theta,
)
from mfcz.experiments.decomposition_experiments import mf_hilbert_operator
from mfcz.grid.box_family import BoxFamily
from mfcz.norms.envelopes import weighted_exponent
from mfcz.norms.power_method import growth_regression, norm_2_exact, norm_p_power_method
from mfcz.operators.multifreq_operator import convolution_operator
from mfcz.weights.characteristics import weight_class_report
from mfcz.weights.weight import (
    constant_weight,
    log_lipschitz_weight,
    power_weight,
    two_valued_weight,
)


logger = logging.getLogger(__name__)


class ThetaFamily(MFCZEnum):
    """Frequency set families compared in the norm scans."""

    ARITHMETIC = "arithmetic", "Arithmetic progression of lattice frequencies"
    RANDOM = "random", "Distinct random lattice frequencies"
    CLUSTERED = "clustered", "Pairs of adjacent lattice frequencies"


class WeightPreset(MFCZEnum):
    """Weights available to the weighted scans."""

    NONE = "none", "No weight"
    CONSTANT = "constant", "w = 1"
    POWER = "power", "max(|x - c|, h)^a"
    TWO_VALUED = "two_valued", "high on half of the torus and 1 elsewhere"
    LOG_LIPSCHITZ = "log_lipschitz", "exp(a u) with u a random trigonometric polynomial"


def make_theta(family, count, spacing, domain, rng):
    match ThetaFamily(family):
        case ThetaFamily.ARITHMETIC:
            return centered_lattice_theta(count, spacing, domain)
        case ThetaFamily.RANDOM:
            return random_lattice_theta(count, domain, rng)
        case ThetaFamily.CLUSTERED:
            return clustered_lattice_theta(count, spacing, domain)


def make_weight(preset, domain, rng, exponent=0.5, high=10.0):
    """Return the preset weight on domain, or None for the unweighted case."""
    match WeightPreset(preset):
        case WeightPreset.NONE:
            return None
        case WeightPreset.CONSTANT:
            return constant_weight(domain)
        case WeightPreset.POWER:
            return power_weight(domain, exponent)
        case WeightPreset.TWO_VALUED:
            return two_valued_weight(domain, high)
        case WeightPreset.LOG_LIPSCHITZ:
            return log_lipschitz_weight(domain, rng)


def _check_enum(enum_class, values, name):
    for value in values:
        try:
            enum_class(value)
        except ValueError as exc:
            choices = [x.value for x in enum_class]
            raise MFCZInvalidParameter(f"{name} must be one of {choices}: {value!r}") from exc


def _gaussian_kernel(width):
    def kernel(offsets, domain):
        return np.exp(-sum(x**2 for x in offsets) / (2 * width**2))

    return kernel


def _table_kernel(values):
    def kernel(offsets, domain):
        return values

    return kernel


class NormScanUnweighted(ExperimentBase):
    """L^p norms of the multi-frequency Hilbert transform for several frequency families.

    Also runs the power-method oracles: convolution with a nonnegative kernel has
    L^p norm ||K||_1 for every p, and random multipliers have L^2 norm sup |m|.
    """

    NAME = "normscan-unweighted"
    ANCHOR = "||T||_{L^p -> L^p} <~ N^{|1/p - 1/2|}, and = 1 for p = 2"
    DEFAULTS = {
        "points_per_dim": 1024,
        "counts": [2, 4, 8, 16, 32, 64],
        "p": 4.0,
        "families": ThetaFamily.values(),
        "spacing": 8,
        "restarts": 4,
        "max_iter": 300,
        "oracle_exponents": [1.5, 2.0, 3.0],
        "oracle_trials": 20,
        "oracle_tolerance": 1e-6,
        "l2_tolerance": 1e-12,
    }

    def check(self, params):
        if not 1 < params["p"] < np.inf:
            raise MFCZInvalidParameter(f"p must be in (1, inf): {params['p']}")
        check_sweep(params["counts"], "counts", min_length=4)
        check_sweep([params["restarts"], params["max_iter"]], "restarts", minimum=0)
        if any(not 1 < x < np.inf for x in params["oracle_exponents"]):
            raise MFCZInvalidParameter("oracle exponents must be in (1, inf)")
        _check_enum(ThetaFamily, params["families"], "families")
        if max(params["counts"]) > params["points_per_dim"] // 2:
            raise MFCZInvalidParameter("counts exceed half the lattice")
        domain = make_domain(1, params["points_per_dim"])
        for count in params["counts"]:
            centered_lattice_theta(count, params["spacing"], domain)

    def generate(self, params, rng):
        domain = make_domain(1, params["points_per_dim"])
        p = params["p"]
        kwargs = {"restarts": params["restarts"], "max_iter": params["max_iter"]}
        frames = []
        l2_rows = []
        results = {"fits": {}}
        verdicts = {}
        for family in params["families"]:
            thetas = [
                make_theta(family, x, params["spacing"], domain, rng) for x in params["counts"]
            ]
            for theta in thetas:
                exact = norm_2_exact(mf_hilbert_operator(theta), domain)
                l2_rows.append({"family": family, "N": theta.size, "norm": exact.value})
            report = growth_regression(
                mf_hilbert_operator, thetas, domain, p, seed=int(rng.integers(2**31)), **kwargs
            )
            table = report.table.copy()
            table.insert(0, "family", family)
            frames.append(table)
            results["fits"][family] = None if report.fit is None else report.fit.serialize()
            if family == ThetaFamily.ARITHMETIC.value:
                verdicts["arithmetic_within_envelope"] = report.within_envelope
            results["exponent"] = report.exponent
        l2 = pd.DataFrame(l2_rows)
        verdicts["l2_exact"] = bool((l2["norm"] - 1).abs().max() <= params["l2_tolerance"])

        oracle = self._oracle_rows(domain, params, rng)
        worst = oracle.groupby("kind")["relative_error"].max()
        for kind, error in worst.items():
            verdicts[f"oracle_{kind}"] = bool(error <= params["oracle_tolerance"])
        return ExperimentResult(
            tables={
                "norms": pd.concat(frames, ignore_index=True),
                "l2_exact": l2,
                "oracle": oracle,
            },
            results=results,
            verdicts=verdicts,
        )

    @staticmethod
    def _oracle_rows(domain, params, rng):
        rows = []
        kwargs = {"restarts": params["restarts"], "max_iter": params["max_iter"]}
        for trial in range(params["oracle_trials"]):
            width = rng.uniform(0.05, 0.3) * domain.side_length
            operator = convolution_operator(_gaussian_kernel(width), name="gaussian")
            exact = float(np.real(operator.symbol(domain).reshape(-1)[0]))
            for p in params["oracle_exponents"]:
                estimate = norm_p_power_method(
                    operator, domain, p, seed=int(rng.integers(2**31)), **kwargs
                )
                rows.append(
                    {
                        "kind": "kernel",
                        "p": p,
                        "trial": trial,
                        "estimate": estimate.value,
                        "exact": exact,
                        "relative_error": abs(estimate.value - exact) / exact,
                    }
                )
            values = rng.standard_normal(domain.shape) + 1j * rng.standard_normal(domain.shape)
            operator = convolution_operator(_table_kernel(values), name="random")
            exact = norm_2_exact(operator, domain).value
            estimate = norm_p_power_method(
                operator, domain, 2.0, seed=int(rng.integers(2**31)), **kwargs
            )
            rows.append(
                {
                    "kind": "multiplier",
                    "p": 2.0,
                    "trial": trial,
                    "estimate": estimate.value,
                    "exact": exact,
                    "relative_error": abs(estimate.value - exact) / exact,
                }
            )
        return pd.DataFrame(rows)


class NormScanWeighted(ExperimentBase):
    """Weighted L^p norms of the multi-frequency Hilbert transform against N^gamma."""

    NAME = "normscan-weighted"
    ANCHOR = (
        "||T||_{L^p(w)} <~ N^gamma, gamma = tp/(s min{2,s}) + |1/2 - 1/s|, "
        "w in A_{p/s} and RH_{t'}"
    )
    DEFAULTS = {
        "points_per_dim": 1024,
        "counts": [2, 4, 8, 16, 32, 64],
        "p": 3.0,
        "s": 2.0,
        "t": 1.0,
        "weight": WeightPreset.POWER.value,
        "weight_exponent": 0.5,
        "high": 10.0,
        "spacing": 8,
        "restarts": 4,
        "max_iter": 300,
        "threshold": 1e6,
    }

    def check(self, params):
        weighted_exponent(params["p"], params["t"], params["s"])
        if not params["p"] >= params["s"]:
            raise MFCZInvalidParameter(f"need p >= s: p={params['p']}, s={params['s']}")
        if np.isinf(params["p"]):
            raise MFCZInvalidParameter("p must be finite")
        check_sweep(params["counts"], "counts", min_length=4)
        _check_enum(WeightPreset, [params["weight"]], "weight")
        if params["weight"] == WeightPreset.NONE.value:
            raise MFCZInvalidParameter("the weighted scan needs a weight")
        domain = make_domain(1, params["points_per_dim"])
        for count in params["counts"]:
            centered_lattice_theta(count, params["spacing"], domain)

    def generate(self, params, rng):
        domain = make_domain(1, params["points_per_dim"])
        weight = make_weight(
            params["weight"], domain, rng, params["weight_exponent"], params["high"]
        )
        p, s, t = params["p"], params["s"], params["t"]
        membership = weight_class_report(
            weight, p, s, t, BoxFamily.dyadic(domain), params["threshold"]
        )
        thetas = [centered_lattice_theta(x, params["spacing"], domain) for x in params["counts"]]
        report = growth_regression(
            mf_hilbert_operator,
            thetas,
            domain,
            p,
            weight=weight,
            t=t,
            s=s,
            restarts=params["restarts"],
            max_iter=params["max_iter"],
            seed=int(rng.integers(2**31)),
        )
        return ExperimentResult(
            tables={"norms": report.table},
            results={
                "exponent": report.exponent,
                "interesting": report.interesting,
                "fit": None if report.fit is None else report.fit.serialize(),
                "weight_class": membership.serialize(),
            },
            verdicts={
                "within_envelope": report.within_envelope,
                "weight_in_class": membership.member,
            },
        )
