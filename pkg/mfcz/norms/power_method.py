"""Operator norm estimates: exact 2 -> 2 multiplier norms and a nonlinear power method for
p -> p lower bounds, optionally in L^p(w).
"""

import logging

import numpy as np
import pandas as pd
from pydantic import Field

from mfcz.common import DEFAULT_POWER_METHOD_RESTARTS, DEFAULT_SEED
from mfcz.data_models import MFCZBaseModel, MFCZEnum
from mfcz.exceptions import MFCZInvalidOperation, MFCZInvalidParameter
from mfcz.grid.torus import GridFunction, TorusDomain, lp_norm_w, weight_values
from mfcz.norms.envelopes import TRIVIAL_EXPONENT, unweighted_exponent, weighted_exponent
from mfcz.norms.growth import MIN_FIT_POINTS, GrowthFit, fit_growth
from mfcz.utils.timing import timer_stats_collector, track_timing


logger = logging.getLogger(__name__)

MONOTONICITY_SLACK = 1e-12
NUM_CHARACTER_STARTS = 4


class NormKind(MFCZEnum):
    """Whether a norm value is exact or a lower bound."""

    EXACT = "exact", "Exact value (2 -> 2 norm of a multiplier)"
    LOWER_BOUND = "lower_bound", "Attained ratio ||Tf|| / ||f|| at a computed f"


class NormEstimate(MFCZBaseModel):
    """Estimate of ||T||_{L^p(w) -> L^p(w)}."""

    p: float = Field(title="p")
    weighted: bool = Field(default=False, title="weighted")
    value: float = Field(title="value", ge=0)
    kind: NormKind = Field(title="kind")
    iterations: int = Field(default=0, title="iterations")
    history: list[float] = Field(
        default=[], title="history", description="Objective per iteration of the best start"
    )
    converged: bool = Field(default=True, title="converged")
    starts: int = Field(default=1, title="starts", description="Number of starting functions")
    extremizer: GridFunction | None = Field(
        default=None, title="extremizer", description="Function attaining value", exclude=True
    )


def norm_2_exact(operator, domain: TorusDomain) -> NormEstimate:
    """Return sup over the lattice of |sum_j m_j| for a Fourier multiplier operator."""
    if not operator.is_multiplier:
        raise MFCZInvalidOperation(
            f"{operator.name} is not a Fourier multiplier; use norm_p_power_method"
        )
    magnitude = np.abs(operator.symbol(domain))
    position = np.unravel_index(np.argmax(magnitude), magnitude.shape)
    frequency = [domain.frequencies()[k] for k in position]
    return NormEstimate(
        p=2.0,
        value=float(magnitude[position]),
        kind=NormKind.EXACT,
        extremizer=GridFunction.character(domain, frequency),
    )


def _positive_weight(domain, weight):
    if weight is None:
        return np.ones(domain.shape)
    values = weight_values(domain, weight)
    if not np.all(values > 0):
        raise MFCZInvalidParameter("the power method needs a strictly positive weight")
    return values


def _dual(g, p, weight):
    """Return |g|^{p-1} phase(g) / ||g||_{p,w}^{p-1}, the norming functional of g."""
    norm = lp_norm_w(g, p, weight)
    if norm == 0:
        return None
    magnitude = np.abs(g.values) / norm
    phase = np.exp(1j * np.angle(g.values))
    return g.with_values(magnitude ** (p - 1) * phase)


def _ratio(operator, f, p, weight):
    denominator = lp_norm_w(f, p, weight)
    if denominator == 0:
        return 0.0
    return lp_norm_w(operator.apply(f), p, weight) / denominator


def _starting_functions(operator, domain, restarts, rng):
    yield "constant", GridFunction.constant(domain, 1.0 + 0j)
    spike = np.zeros(domain.shape, dtype=complex)
    spike[(domain.points_per_dim // 2,) * domain.dim] = 1.0
    yield "spike", GridFunction(domain, spike)
    theta = operator.theta
    if theta is not None:
        snapped, _ = domain.snap_frequencies(theta.freqs)
        waves = sum(GridFunction.character(domain, x).values for x in snapped)
        yield "dirichlet", GridFunction(domain, waves)
    if operator.is_multiplier:
        magnitude = np.abs(operator.symbol(domain)).reshape(-1)
        count = min(NUM_CHARACTER_STARTS, magnitude.size)
        for flat in np.argsort(magnitude)[::-1][:count]:
            position = np.unravel_index(flat, domain.shape)
            frequency = [domain.frequencies()[k] for k in position]
            yield "character", GridFunction.character(domain, frequency)
    for _ in range(restarts):
        values = rng.standard_normal(domain.shape) + 1j * rng.standard_normal(domain.shape)
        yield "random", GridFunction(domain, values)


def _iterate(operator, adjoint, f, p, weight, tol, max_iter):
    """Run the alternating duality iteration from f.

    Returns the final f, the objective history and a convergence flag.
    """
    q = p / (p - 1)
    norm = lp_norm_w(f, p, weight)
    if norm == 0:
        return None, [0.0], True
    f = f.with_values(f.values / norm)
    history = [_ratio(operator, f, p, weight)]
    for _ in range(max_iter):
        z = _dual(operator.apply(f), p, weight)
        if z is None:
            return f, history, True
        pulled = adjoint.apply(z * weight)
        w = pulled.with_values(pulled.values / weight)
        candidate = _dual(w, q, weight)
        if candidate is None:
            return f, history, True
        value = _ratio(operator, candidate, p, weight)
        if value < history[-1] * (1 - MONOTONICITY_SLACK):
            logger.warning(
                "Power method objective decreased from %.15g to %.15g", history[-1], value
            )
            return f, history, False
        f = candidate
        history.append(value)
        if value - history[-2] <= tol * value:
            return f, history, True
    return f, history, False


@track_timing(timer_stats_collector)
def norm_p_power_method(
    operator,
    domain: TorusDomain,
    p,
    weight=None,
    restarts=DEFAULT_POWER_METHOD_RESTARTS,
    tol=1e-13,
    max_iter=1000,
    seed=DEFAULT_SEED,
) -> NormEstimate:
    """Return a lower bound for ||T||_{L^p(w) -> L^p(w)}.

    Each start f is normalized and iterated as y = Tf, z = dual_p(y),
    u = w^{-1} T^*(w z), f <- dual_{p'}(u), where dual_p(g) = |g|^{p-1} phase(g) / ||g||^{p-1}
    in L^p(w). The attained ratio ||Tf|| / ||f|| never decreases along an iteration.

    Parameters
    ----------
    operator : MultiFreqOperator | PointwiseMultiplication
    domain : TorusDomain
    p : float
        Exponent in (1, inf).
    weight : Weight | numpy.ndarray | None
        Strictly positive weight; None means w = 1.
    restarts : int
        Number of random starts added to the deterministic ones (constant, centered spike,
        Dirichlet sum over theta, characters at the largest symbol values).
    tol : float
        Relative improvement below which an iteration stops.
    max_iter : int
    seed : int

    Returns
    -------
    NormEstimate
        kind is LOWER_BOUND. The value is recomputed at the returned extremizer.

    """
    if not 1 < p < np.inf:
        raise MFCZInvalidParameter(f"p must be in (1, inf): {p}")
    weights = _positive_weight(domain, weight)
    adjoint = operator.adjoint()
    rng = np.random.default_rng(seed)
    best = None
    starts = 0
    for label, start in _starting_functions(operator, domain, restarts, rng):
        starts += 1
        f, history, converged = _iterate(operator, adjoint, start, p, weights, tol, max_iter)
        if f is None:
            continue
        logger.debug("Power method start %s reached %.12g", label, history[-1])
        if best is None or history[-1] > best[1][-1]:
            best = (f, history, converged)
    if best is None:
        return NormEstimate(
            p=p, weighted=weight is not None, value=0.0, kind=NormKind.LOWER_BOUND, starts=starts
        )
    f, history, converged = best
    if not converged:
        logger.warning("Power method for p=%s did not converge in %s iterations", p, max_iter)
    return NormEstimate(
        p=p,
        weighted=weight is not None,
        value=_ratio(operator, f, p, weights),
        kind=NormKind.LOWER_BOUND,
        iterations=len(history) - 1,
        history=history,
        converged=converged,
        starts=starts,
        extremizer=f,
    )


def estimate_norm(operator, domain, p, weight=None, **kwargs) -> NormEstimate:
    """Exact value for unweighted 2 -> 2 multiplier norms, the power method otherwise."""
    if p == 2 and weight is None and operator.is_multiplier:
        return norm_2_exact(operator, domain)
    return norm_p_power_method(operator, domain, p, weight=weight, **kwargs)


class NormScanReport(MFCZBaseModel):
    """Norm estimates over an N sweep with the envelope they are compared with."""

    p: float = Field(title="p")
    t: float | None = Field(default=None, title="t")
    s: float | None = Field(default=None, title="s")
    exponent: float = Field(title="exponent", description="Envelope exponent of N")
    interesting: bool = Field(
        title="interesting", description="The envelope exponent is below the trivial exponent 1"
    )
    table: pd.DataFrame = Field(title="table", description="Columns N, estimate, envelope, ratio")
    fit: GrowthFit | None = Field(default=None, title="fit")
    within_envelope: bool = Field(
        title="within_envelope",
        description="The fitted slope does not exceed the envelope exponent by more than 0.1",
    )


def growth_regression(
    operator_factory, thetas, domain: TorusDomain, p, weight=None, t=None, s=None, **kwargs
) -> NormScanReport:
    """Estimate ||T_Theta|| for every Theta in the sweep and fit the growth in N.

    The envelope is N^{|1/p - 1/2|} without a weight and N^gamma with
    gamma = t p / (s min{2, s}) + |1/2 - 1/s| when a weight and (t, s) are given.
    """
    if weight is not None and (t is None or s is None):
        raise MFCZInvalidParameter("weighted scans need both t and s")
    if len(thetas) < MIN_FIT_POINTS:
        raise MFCZInvalidParameter(
            f"growth_regression needs at least {MIN_FIT_POINTS} values of N"
        )
    if weight is None:
        exponent = unweighted_exponent(p)
    else:
        exponent = weighted_exponent(p, t, s)
    rows = []
    for theta in thetas:
        estimate = estimate_norm(operator_factory(theta), domain, p, weight=weight, **kwargs)
        envelope = theta.size**exponent
        rows.append(
            {
                "N": theta.size,
                "estimate": estimate.value,
                "envelope": envelope,
                "ratio": estimate.value / envelope,
            }
        )
        logger.info("N=%s p=%s estimate=%.6g", theta.size, p, estimate.value)
    table = pd.DataFrame(rows, columns=["N", "estimate", "envelope", "ratio"])
    fit = None
    if (table["estimate"] > 0).all():
        fit = fit_growth(table["N"], table["estimate"], variable="N", envelope=exponent)
    within = fit is None or fit.degenerate or fit.exponent <= exponent + 0.1
    return NormScanReport(
        p=p,
        t=t,
        s=s,
        exponent=exponent,
        interesting=exponent < TRIVIAL_EXPONENT,
        table=table,
        fit=fit,
        within_envelope=within,
    )
