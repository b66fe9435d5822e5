"""Constants comparing sup norms on Q with p-averages on 3Q over exponential spans."""

import logging

import numpy as np
import pandas as pd
from pydantic import Field
from scipy import linalg, optimize

from mfcz.common import (
    DEFAULT_MIN_POINTS_PER_FREQUENCY,
    DEFAULT_MULTI_START_COUNT,
    DEFAULT_SEED,
    DEFAULT_SUMSET_CAP,
)
from mfcz.data_models import MFCZBaseModel
from mfcz.exceptions import MFCZGramError, MFCZInvalidParameter, MFCZResolutionError
from mfcz.frequency.freqset import FrequencySet, sumset
from mfcz.grid.torus import Box, TorusDomain
from mfcz.span.gram import build_gram, exponential_basis
from mfcz.utils.timing import timed_info


logger = logging.getLogger(__name__)

# Intermediate exponents visited on the way from 2 down to p < 2.
_CONTINUATION_EXPONENTS = (1.75, 1.5, 1.25)
_CONSTRAINED_IRLS_ITERATIONS = 40


class SpanConstantResult(MFCZBaseModel):
    """Value of sup_phi ||phi||_{L^inf(Q)} / (avg_{3Q} |phi|^p)^{1/p} over the span."""

    num_frequencies: int = Field(title="num_frequencies", description="N")
    p: float = Field(title="p", description="Averaging exponent on 3Q")
    value: float = Field(title="value", description="Measured constant")
    lower_bound_only: bool = Field(
        title="lower_bound_only",
        description="True when the value is a lower bound found by optimization",
    )
    argmax: list[float] = Field(title="argmax", description="Point of Q realizing the value")
    envelope: float = Field(title="envelope", description="N^(1/p)")
    gram_rank: int = Field(title="gram_rank", description="Numerical rank of the Gram matrix")
    condition_estimate: float = Field(title="condition_estimate", description="Gram condition")

    @property
    def ratio_to_envelope(self) -> float:
        return self.value / self.envelope


class EvenExponentBound(MFCZBaseModel):
    """Upper bound for the p = 2k constant obtained from the sumset of order k."""

    k: int = Field(title="k", description="Sumset order")
    num_frequencies: int = Field(title="num_frequencies", description="N")
    sumset_size: int = Field(title="sumset_size", description="Cardinality of the k-fold sumset")
    bound: float = Field(
        title="bound", description="C_2(sumset)^(1/k), a certified bound for the p = 2k constant"
    )
    cardinality_bound: float = Field(
        title="cardinality_bound", description="(sumset size)^(1/(2k))"
    )
    trivial_bound: float = Field(
        title="trivial_bound", description="(N^k)^(1/(2k)) = N^(1/2) from the trivial count"
    )


def check_resolution(theta, tripled: Box, domain: TorusDomain, min_points_per_frequency):
    """Raise MFCZResolutionError if 3Q wraps around the torus or is too coarsely sampled."""
    if tripled.radius > domain.side_length / 2 * (1 + 1e-9):
        raise MFCZResolutionError(
            f"3Q with radius {tripled.radius} wraps around a torus of side {domain.side_length}; "
            f"use L >= {2 * tripled.radius}"
        )
    per_axis = min(tripled.points(domain).counts)
    required = min_points_per_frequency * theta.size
    if per_axis < required:
        raise MFCZResolutionError(
            f"3Q holds {per_axis} grid points per axis; {required} are needed for "
            f"N={theta.size}. Increase points_per_dim."
        )


def _p2_quadratic_forms(theta, box, domain):
    tripled = box.dilate(3)
    gram = build_gram(theta, tripled, domain)
    if not gram.is_full_rank:
        raise MFCZGramError(
            f"Gram matrix on {tripled} has rank {gram.rank} < {theta.size}; "
            f"clustered pairs: {gram.clustered_pairs}",
            clustered_pairs=gram.clustered_pairs,
        )
    q_points = box.points(domain)
    forms = gram.quadratic_form(exponential_basis(theta, q_points.coords))
    return gram, q_points, forms


def _constrained_minimizer(basis, anchor, p, weights_floor, start):
    """Minimize sum |basis c|^p subject to anchor . c = 1 by reweighted least squares.

    Each step solves the weighted problem in closed form,
    c = M^{-1} conj(anchor) / (anchor^T M^{-1} conj(anchor)) with M = basis^* W basis,
    followed by a bounded line search, so the objective never increases.
    """

    def power_sum(c):
        return float(np.sum(np.abs(basis @ c) ** p))

    coefficients = start
    value = power_sum(coefficients)
    for _ in range(_CONSTRAINED_IRLS_ITERATIONS):
        values = np.abs(basis @ coefficients)
        floor = max(weights_floor, 1e-8 * float(values.max()))
        weights = np.maximum(values, floor) ** (p - 2)
        normal = basis.conj().T @ (weights[:, None] * basis)
        solved, *_ = linalg.lstsq(normal, anchor.conj(), lapack_driver="gelsd")
        scale = anchor @ solved
        if scale == 0 or not np.isfinite(scale):
            break
        direction = solved / scale - coefficients
        search = optimize.minimize_scalar(
            lambda t: power_sum(coefficients + t * direction),
            bounds=(0.0, 1.0),
            method="bounded",
            options={"xatol": 1e-8},
        )
        trial = coefficients + search.x * direction
        trial_value = power_sum(trial)
        if trial_value >= value * (1 - 1e-12):
            break
        coefficients, value = trial, trial_value
    return coefficients


def compute_span_constant(
    theta: FrequencySet,
    box: Box,
    p: float,
    domain: TorusDomain,
    multi_start_count=DEFAULT_MULTI_START_COUNT,
    seed=DEFAULT_SEED,
    min_points_per_frequency=DEFAULT_MIN_POINTS_PER_FREQUENCY,
) -> SpanConstantResult:
    """Compute the span constant of theta on Q for an averaging exponent p in [1, 2].

    Parameters
    ----------
    theta : FrequencySet
    box : Box
        The box Q. Averages are taken over 3Q and the sup over the grid points of Q.
    p : float
    domain : TorusDomain
    multi_start_count : int
        Number of random anchor points of Q tried when p < 2.
    seed : int
        Seed for the anchor points.
    min_points_per_frequency : int
        Grid points per axis required across 3Q for every frequency.

    Returns
    -------
    SpanConstantResult
        Exact for p = 2. For p < 2 the value is a lower bound: the best ratio over the span
        elements found by the optimization, each of which is an admissible competitor.

    """
    if not 1 <= p <= 2:
        raise MFCZInvalidParameter(f"p must be in [1, 2]: {p}")
    tripled = box.dilate(3)
    check_resolution(theta, tripled, domain, min_points_per_frequency)
    gram, q_points, forms = _p2_quadratic_forms(theta, box, domain)
    best_index = int(np.argmax(forms))
    value_p2 = float(np.sqrt(gram.measure * max(forms[best_index], 0.0)))
    common = {
        "num_frequencies": theta.size,
        "envelope": float(theta.size ** (1.0 / p)),
        "gram_rank": gram.rank,
        "condition_estimate": gram.condition_estimate,
    }
    if p == 2:
        return SpanConstantResult(
            p=p,
            value=value_p2,
            lower_bound_only=False,
            argmax=q_points.coords[best_index].tolist(),
            **common,
        )

    cell_volume = domain.cell_volume
    basis3 = exponential_basis(theta, tripled.points(domain).coords)
    basis_q = exponential_basis(theta, q_points.coords)

    def ratio(coefficients):
        average = np.sum(np.abs(basis3 @ coefficients) ** p) * cell_volume / gram.measure
        peak = float(np.max(np.abs(basis_q @ coefficients)))
        return peak / average ** (1.0 / p)

    rng = np.random.default_rng(seed)
    count = min(multi_start_count, len(forms))
    anchors = [best_index] + rng.choice(len(forms), size=count, replace=False).tolist()
    exponents = [x for x in _CONTINUATION_EXPONENTS if x > p] + [p]
    best_value, best_point = 0.0, q_points.coords[best_index]
    for index in dict.fromkeys(anchors):
        anchor = basis_q[index]
        # p = 2 constrained minimizer: the normalized reproducing kernel at the anchor.
        coefficients = gram.inverse @ anchor.conj()
        coefficients = coefficients / (anchor @ coefficients)
        candidates = [coefficients]
        for exponent in exponents:
            coefficients = _constrained_minimizer(
                basis3, anchor, exponent, 1e-10, coefficients
            )
            candidates.append(coefficients)
        value = max(ratio(c) for c in candidates)
        if value > best_value:
            best_value, best_point = value, q_points.coords[index]
    logger.debug("span constant N=%s p=%s: %.12g", theta.size, p, best_value)
    return SpanConstantResult(
        p=p,
        value=float(best_value),
        lower_bound_only=True,
        argmax=np.asarray(best_point).tolist(),
        **common,
    )


def span_constant(theta: FrequencySet, box: Box, p: float, domain: TorusDomain, **kwargs):
    """Return the value of :func:`compute_span_constant`."""
    return compute_span_constant(theta, box, p, domain, **kwargs).value


def even_exponent_bound(
    theta: FrequencySet,
    box: Box,
    k: int,
    domain: TorusDomain,
    cap=DEFAULT_SUMSET_CAP,
    min_points_per_frequency=DEFAULT_MIN_POINTS_PER_FREQUENCY,
) -> EvenExponentBound:
    """Bound the p = 2k span constant of theta through the p = 2 constant of its sumset.

    phi^k lies in the span of the k-fold sumset, so
    ||phi||_inf <= C_2(sumset)^{1/k} (avg_{3Q} |phi|^{2k})^{1/(2k)}.
    """
    if k < 1:
        raise MFCZInvalidParameter(f"k must be a positive integer: {k}")
    sums = theta if k == 1 else sumset(theta, k, cap=cap)
    value = span_constant(
        sums, box, 2, domain, min_points_per_frequency=min_points_per_frequency
    )
    return EvenExponentBound(
        k=k,
        num_frequencies=theta.size,
        sumset_size=sums.size,
        bound=value ** (1.0 / k),
        cardinality_bound=sums.size ** (1.0 / (2 * k)),
        trivial_bound=float(np.sqrt(theta.size)),
    )


def span_constant_even_p(theta: FrequencySet, box: Box, k: int, domain: TorusDomain, **kwargs):
    """Return the bound of :func:`even_exponent_bound`."""
    return even_exponent_bound(theta, box, k, domain, **kwargs).bound


@timed_info
def span_constant_table(thetas, box: Box, p: float, domain: TorusDomain, **kwargs):
    """Return a DataFrame with columns N, p, constant, ratio_to_N_pow for each frequency set."""
    rows = []
    for theta in thetas:
        result = compute_span_constant(theta, box, p, domain, **kwargs)
        rows.append(
            {
                "N": theta.size,
                "p": p,
                "constant": result.value,
                "ratio_to_N_pow": result.ratio_to_envelope,
                "lower_bound_only": result.lower_bound_only,
            }
        )
    return pd.DataFrame(rows, columns=["N", "p", "constant", "ratio_to_N_pow", "lower_bound_only"])
