"""Experiments on Muckenhoupt and reverse Holder characteristics."""

import logging

import numpy as np
import pandas as pd

from mfcz.exceptions import MFCZInvalidParameter
from mfcz.experiments.base import ExperimentBase, ExperimentResult, check_sweep, make_domain
from mfcz.grid.box_family import BoxFamily
from mfcz.weights.characteristics import (
    a1_characteristic,
    ap_characteristic,
    jn_identity_check,
    jn_refinement_check,
    rh_characteristic,
)
from mfcz.weights.weight import (
    constant_weight,
    log_lipschitz_weight,
    power_weight,
    two_valued_weight,
)


logger = logging.getLogger(__name__)


class WeightsJN(ExperimentBase):
    """Exact values on constant weights, the A_p duality identity and the power identity.

    The power identity relates w in A_r and RH_s to w^s in A_{1 + s(r - 1)}. Memberships are
    decided twice: by a threshold on one grid and by the growth of the characteristics under
    grid refinement.
    """

    NAME = "weights-jn"
    ANCHOR = "w in A_r and RH_s iff w^s in A_{1+s(r-1)}; [w^{1-p'}]_{A_p'} = [w]_{A_p}^{p'-1}"
    DEFAULTS = {
        "points_per_dim": 256,
        "refinement_points": [64, 128, 256, 512],
        "exponents": [0.5, -0.8, 1.5],
        "high": 100.0,
        "amplitude": 1.0,
        "constant_value": 3.0,
        "p": 3.0,
        "r": 2.0,
        "s": 2.0,
        "threshold": 1e6,
        "exact_tolerance": 1e-12,
        "duality_tolerance": 1e-10,
        "slope_tolerance": 0.15,
    }

    def check(self, params):
        if not 1 < params["p"] < np.inf:
            raise MFCZInvalidParameter(f"p must be in (1, inf): {params['p']}")
        if not (params["r"] > 1 and 1 < params["s"] < np.inf):
            raise MFCZInvalidParameter("need r > 1 and 1 < s < inf")
        check_sweep(params["refinement_points"], "refinement_points", minimum=2, min_length=2)
        if not params["constant_value"] > 0 or not params["high"] > 0:
            raise MFCZInvalidParameter("weight values must be positive")
        make_domain(1, params["points_per_dim"])

    @staticmethod
    def _factories(params, seed):
        factories = {
            f"power({a:g})": (lambda domain, a=a: power_weight(domain, a))
            for a in params["exponents"]
        }
        factories["two_valued"] = lambda domain: two_valued_weight(domain, params["high"])
        factories["log_lipschitz"] = lambda domain: log_lipschitz_weight(
            domain, np.random.default_rng(seed), params["amplitude"]
        )
        return factories

    def generate(self, params, rng):
        domain = make_domain(1, params["points_per_dim"])
        family = BoxFamily.dyadic(domain)
        p, r, s = params["p"], params["r"], params["s"]

        constant = constant_weight(domain, params["constant_value"])
        exact = pd.DataFrame(
            [
                {"characteristic": f"A_{p:g}", "value": ap_characteristic(constant, p, family)},
                {"characteristic": "A_1", "value": a1_characteristic(constant, family)},
                {"characteristic": f"RH_{s:g}", "value": rh_characteristic(constant, s, family)},
                {"characteristic": "RH_inf", "value": rh_characteristic(constant, np.inf, family)},
            ]
        )
        exact["error"] = (exact["value"] - 1).abs()

        factories = self._factories(params, int(rng.integers(2**31)))
        conjugate = p / (p - 1)
        duality_rows = []
        threshold_rows = []
        refinement_frames = []
        refinement_rows = []
        domains = [make_domain(1, x) for x in params["refinement_points"]]
        for name, factory in factories.items():
            weight = factory(domain)
            direct = ap_characteristic(weight, p, family)
            dual = ap_characteristic(weight.power(1 - conjugate), conjugate, family)
            expected = direct ** (conjugate - 1)
            duality_rows.append(
                {
                    "weight": name,
                    "ap_char": direct,
                    "dual_char": dual,
                    "relative_error": abs(dual - expected) / expected,
                }
            )
            check = jn_identity_check(weight, r, s, family, params["threshold"])
            row = {"weight": name}
            row.update(check.dict())
            threshold_rows.append(row)

            refinement = jn_refinement_check(
                factory, domains, r, s, slope_tolerance=params["slope_tolerance"]
            )
            table = refinement.table.copy()
            table.insert(0, "weight", name)
            refinement_frames.append(table)
            refinement_rows.append(
                {
                    "weight": name,
                    "ap_slope": refinement.ap_slope,
                    "rh_slope": refinement.rh_slope,
                    "power_slope": refinement.power_slope,
                    "left_member": refinement.left_member,
                    "right_member": refinement.right_member,
                    "agree": refinement.agree,
                }
            )
        duality = pd.DataFrame(duality_rows)
        threshold = pd.DataFrame(threshold_rows)
        slopes = pd.DataFrame(refinement_rows)
        return ExperimentResult(
            tables={
                "constant": exact,
                "duality": duality,
                "threshold": threshold,
                "refinement": pd.concat(refinement_frames, ignore_index=True),
                "refinement_slopes": slopes,
            },
            results={
                "max_constant_error": float(exact["error"].max()),
                "max_duality_error": float(duality["relative_error"].max()),
            },
            verdicts={
                "constant_exact": bool(exact["error"].max() <= params["exact_tolerance"]),
                "duality": bool(duality["relative_error"].max() <= params["duality_tolerance"]),
                "threshold_agreement": bool(threshold["agree"].all()),
                "refinement_agreement": bool(slopes["agree"].all()),
            },
        )
