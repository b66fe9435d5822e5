"""Muckenhoupt A_p and reverse Holder RH_s characteristics over box families."""

import logging

import numpy as np
import pandas as pd
from pydantic import Field

from mfcz.common import DEFAULT_MEMBERSHIP_THRESHOLD
from mfcz.data_models import MFCZBaseModel
from mfcz.exceptions import MFCZInvalidParameter
from mfcz.grid.box_family import BoxFamily
from mfcz.norms.growth import MIN_FIT_POINTS
from mfcz.weights.weight import Weight


logger = logging.getLogger(__name__)

REFINEMENT_SLOPE_TOLERANCE = 0.15


def _conjugate(p):
    if p == 1:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1)


def _box_means(values, layer, box, domain):
    if layer is not None:
        return layer.to_blocks(values).mean(axis=1)
    return np.mean(box.points(domain).gather(values))


def _box_mins(values, layer, box, domain):
    if layer is not None:
        return layer.to_blocks(values).min(axis=1)
    return np.min(box.points(domain).gather(values))


def _box_maxs(values, layer, box, domain):
    if layer is not None:
        return layer.to_blocks(values).max(axis=1)
    return np.max(box.points(domain).gather(values))


def _check_weight_zeros(weight: Weight, p):
    if p > 1 and weight.has_zeros:
        logger.warning(
            "Weight %s vanishes somewhere; w^(1-p') uses the floor and is flagged", weight.name
        )


def ap_characteristic(weight: Weight, p, family: BoxFamily) -> float:
    """Return sup_Q (avg_Q w)(avg_Q w^{1-p'})^{p-1}; p = 1 uses (avg_Q w) / min_Q w."""
    if p < 1 or np.isinf(p):
        raise MFCZInvalidParameter(f"A_p needs 1 <= p < inf: {p}")
    _check_weight_zeros(weight, p)
    values = weight.values
    domain = family.domain
    if p == 1:
        return family.max_over_boxes(
            lambda layer, box: _box_means(values, layer, box, domain)
            / _box_mins(values, layer, box, domain)
        )
    with np.errstate(over="ignore"):
        dual = values ** (1 - _conjugate(p))

    def products(layer, box):
        with np.errstate(over="ignore"):
            return _box_means(values, layer, box, domain) * _box_means(
                dual, layer, box, domain
            ) ** (p - 1)

    return family.max_over_boxes(products)


def a1_characteristic(weight: Weight, family: BoxFamily) -> float:
    return ap_characteristic(weight, 1, family)


def rh_characteristic(weight: Weight, s, family: BoxFamily) -> float:
    """Return sup_Q (avg_Q w^s)^{1/s} / avg_Q w; s = inf uses max_Q w / avg_Q w."""
    if not s > 1:
        raise MFCZInvalidParameter(f"RH_s needs s > 1: {s}")
    values = weight.values
    domain = family.domain
    # rescaled so w^s stays finite
    scaled = values / np.max(values)
    if np.isinf(s):
        return family.max_over_boxes(
            lambda layer, box: _box_maxs(scaled, layer, box, domain)
            / _box_means(scaled, layer, box, domain)
        )
    powered = scaled**s
    return family.max_over_boxes(
        lambda layer, box: _box_means(powered, layer, box, domain) ** (1 / s)
        / _box_means(scaled, layer, box, domain)
    )


class JNReport(MFCZBaseModel):
    """A_r and RH_s characteristics of w against the A_{1+s(r-1)} characteristic of w^s."""

    r: float = Field(title="r")
    s: float = Field(title="s")
    ap_char: float = Field(title="ap_char", description="[w]_{A_r}")
    rh_char: float = Field(title="rh_char", description="[w]_{RH_s}")
    power_char: float = Field(title="power_char", description="[w^s]_{A_{1+s(r-1)}}")
    threshold: float = Field(title="threshold", description="Membership threshold")
    left_member: bool = Field(title="left_member", description="w in A_r and in RH_s")
    right_member: bool = Field(title="right_member", description="w^s in A_{1+s(r-1)}")
    agree: bool = Field(title="agree")
    floor_binds: bool = Field(title="floor_binds")


def jn_identity_check(
    weight: Weight, r, s, family: BoxFamily, threshold=DEFAULT_MEMBERSHIP_THRESHOLD
) -> JNReport:
    """Compare membership of w in A_r and RH_s with membership of w^s in A_{1+s(r-1)}."""
    if not (r > 1 and s > 1):
        raise MFCZInvalidParameter(f"the power identity needs r > 1 and s > 1: r={r}, s={s}")
    ap_char = ap_characteristic(weight, r, family)
    rh_char = rh_characteristic(weight, s, family)
    power_char = ap_characteristic(weight.power(s), 1 + s * (r - 1), family)
    left = bool(ap_char <= threshold and rh_char <= threshold)
    right = bool(power_char <= threshold)
    if left != right:
        logger.warning(
            "Membership verdicts disagree for %s: A_r and RH_s %s, power %s",
            weight.name,
            left,
            right,
        )
    return JNReport(
        r=r,
        s=s,
        ap_char=ap_char,
        rh_char=rh_char,
        power_char=power_char,
        threshold=threshold,
        left_member=left,
        right_member=right,
        agree=left == right,
        floor_binds=weight.floor_binds,
    )


def _log2_slope(x, values):
    x = np.asarray(x, dtype=float)
    y = np.log2(np.asarray(values, dtype=float))
    if not np.all(np.isfinite(y)):
        return np.inf
    return float(np.polyfit(x, y, 1)[0])


class RefinementReport(MFCZBaseModel):
    """Characteristics of one weight profile as the grid is refined."""

    r: float = Field(title="r")
    s: float = Field(title="s")
    table: pd.DataFrame = Field(
        title="table", description="Columns points_per_dim, ap_char, rh_char, power_char"
    )
    ap_slope: float = Field(title="ap_slope", description="d log2 [w]_{A_r} / d log2 M")
    rh_slope: float = Field(title="rh_slope")
    power_slope: float = Field(title="power_slope")
    slope_tolerance: float = Field(title="slope_tolerance")
    left_member: bool = Field(title="left_member")
    right_member: bool = Field(title="right_member")
    agree: bool = Field(title="agree")


def jn_refinement_check(
    weight_factory, domains, r, s, slope_tolerance=REFINEMENT_SLOPE_TOLERANCE
) -> RefinementReport:
    """Decide memberships from the growth of the characteristics under grid refinement.

    On a finite grid every characteristic is finite; a characteristic whose log2 grows with
    slope above slope_tolerance in log2 M is taken to diverge.

    Parameters
    ----------
    weight_factory : callable
        Builds the weight on a domain.
    domains : list[TorusDomain]
        Increasingly fine grids of the same torus.
    r : float
    s : float
    slope_tolerance : float

    """
    if len(domains) < 2:
        raise MFCZInvalidParameter("a refinement check needs at least two grids")
    rows = []
    for domain in domains:
        weight = weight_factory(domain)
        family = BoxFamily.dyadic(domain)
        rows.append(
            {
                "points_per_dim": domain.points_per_dim,
                "ap_char": ap_characteristic(weight, r, family),
                "rh_char": rh_characteristic(weight, s, family),
                "power_char": ap_characteristic(weight.power(s), 1 + s * (r - 1), family),
            }
        )
    table = pd.DataFrame(rows)
    x = np.log2(table["points_per_dim"])
    ap_slope = _log2_slope(x, table["ap_char"])
    rh_slope = _log2_slope(x, table["rh_char"])
    power_slope = _log2_slope(x, table["power_char"])
    left = bool(ap_slope <= slope_tolerance and rh_slope <= slope_tolerance)
    right = bool(power_slope <= slope_tolerance)
    return RefinementReport(
        r=r,
        s=s,
        table=table,
        ap_slope=ap_slope,
        rh_slope=rh_slope,
        power_slope=power_slope,
        slope_tolerance=slope_tolerance,
        left_member=left,
        right_member=right,
        agree=left == right,
    )


def depth_growth(weight: Weight, characteristic, max_depth=None, **kwargs) -> pd.DataFrame:
    """Return the characteristic over dyadic families of increasing depth.

    characteristic is called as ``characteristic(weight, family=family, **kwargs)``. The
    ``slope`` attribute of the returned frame is the slope of log2(characteristic) against
    the depth over the last MIN_FIT_POINTS depths (NaN with fewer depths).
    """
    domain = weight.domain
    deepest = int(np.log2(domain.points_per_dim))
    max_depth = deepest if max_depth is None else min(max_depth, deepest)
    rows = []
    for depth in range(1, max_depth + 1):
        family = BoxFamily.dyadic(domain, depth=depth)
        rows.append({"depth": depth, "value": characteristic(weight, family=family, **kwargs)})
    table = pd.DataFrame(rows)
    tail = table.tail(MIN_FIT_POINTS)
    table.attrs["slope"] = (
        _log2_slope(tail["depth"], tail["value"]) if len(tail) >= 2 else float("nan")
    )
    return table


class WeightClassReport(MFCZBaseModel):
    """Characteristics of a weight relevant to the class A_{p/s} and RH_{t'}."""

    p: float = Field(title="p")
    s: float = Field(title="s")
    t: float = Field(title="t")
    t_prime: float = Field(title="t_prime", description="t / (t - 1)")
    ap_char: float = Field(title="ap_char", description="[w]_{A_{p/s}}")
    a1_char: float = Field(title="a1_char", description="[w]_{A_1}")
    rh_char: float = Field(title="rh_char", description="[w]_{RH_{t'}}")
    family: str = Field(title="family", description="Description of the box family")
    num_boxes: int = Field(title="num_boxes")
    floor_binds: bool = Field(title="floor_binds")
    threshold: float = Field(default=DEFAULT_MEMBERSHIP_THRESHOLD, title="threshold")
    member: bool = Field(title="member", description="Both class characteristics <= threshold")


def _describe(family: BoxFamily) -> str:
    parts = [f"tiles of {x} points" for x in family.scales]
    if family.extra_boxes:
        parts.append(f"{len(family.extra_boxes)} listed boxes")
    return ", ".join(parts)


def weight_class_report(
    weight: Weight, p, s, t, family: BoxFamily, threshold=DEFAULT_MEMBERSHIP_THRESHOLD
) -> WeightClassReport:
    """Evaluate [w]_{A_{p/s}}, [w]_{A_1} and [w]_{RH_{t'}} on the family."""
    if not (p >= s >= 1 and t >= 1):
        raise MFCZInvalidParameter(f"need p >= s >= 1 and t >= 1: p={p}, s={s}, t={t}")
    t_prime = _conjugate(t)
    ap_char = ap_characteristic(weight, p / s, family)
    rh_char = rh_characteristic(weight, t_prime, family)
    return WeightClassReport(
        p=p,
        s=s,
        t=t,
        t_prime=t_prime,
        ap_char=ap_char,
        a1_char=a1_characteristic(weight, family),
        rh_char=rh_char,
        family=_describe(family),
        num_boxes=len(family),
        floor_binds=weight.floor_binds,
        threshold=threshold,
        member=bool(ap_char <= threshold and rh_char <= threshold),
    )


def class_membership(
    weight: Weight, p, p0, q0, family: BoxFamily, threshold=DEFAULT_MEMBERSHIP_THRESHOLD
) -> WeightClassReport:
    """Check w against A_{p/p0} and RH_{(q0/p)'} for p0 < p < q0.

    The report carries s = p0 and t = q0 / p, so t_prime = q0 / (q0 - p) is the reverse
    Holder exponent consumed by the weighted growth exponents.
    """
    if not 1 <= p0 < p < q0 or np.isinf(q0):
        raise MFCZInvalidParameter(f"need 1 <= p0 < p < q0 < inf: p0={p0}, p={p}, q0={q0}")
    return weight_class_report(weight, p, p0, q0 / p, family, threshold)
