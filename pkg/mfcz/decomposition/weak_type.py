"""Weak-type (1,1) measurements: sup_lambda lambda |{|Tf| > lambda}| / ||f||_1."""

import logging

import numpy as np
import pandas as pd
from pydantic import Field

from mfcz.common import DEFAULT_SEED
from mfcz.data_models import MFCZBaseModel, MFCZEnum
from mfcz.exceptions import MFCZInvalidParameter
from mfcz.frequency.freqset import FrequencySet
from mfcz.grid.torus import GridFunction, TorusDomain, lp_norm
from mfcz.norms.growth import GrowthFit, fit_growth
from mfcz.operators.symbols import bump_profile
from mfcz.utils.timing import timer_stats_collector, track_timing


logger = logging.getLogger(__name__)

WEAK_TYPE_SLOPE_BAND = (0.3, 0.65)


class WeakTypeFamily(MFCZEnum):
    """Test functions for weak-type measurements."""

    SPIKES = "spikes", "Unit-mass spike at the center of the torus"
    DUST = "dust", "Random positive masses on a few random pixels of the central region"
    DIRICHLET = "dirichlet", "bump(x) * sum_j e^{i xi_j x}"


class WeakTypeReport(MFCZBaseModel):
    """Measured weak-type ratios over an N sweep."""

    table: pd.DataFrame = Field(title="table", description="Rows (N, family, ratio)")
    maxima: pd.DataFrame = Field(title="maxima", description="Largest ratio per N")
    fit: GrowthFit | None = Field(title="fit", description="Log-log fit of the maxima vs N")
    upper_side_met: bool = Field(
        title="upper_side_met", description="Fitted slope is at most the upper end of the band"
    )
    lower_side_met: bool = Field(
        title="lower_side_met", description="Fitted slope is at least the lower end of the band"
    )


def weak_type_ratio(tf: GridFunction, f_l1: float, lambdas=None) -> float:
    """Return sup_lambda lambda |{|Tf| > lambda}| / ||f||_1.

    Without a lambda grid the sup is exact: with |Tf| sorted decreasingly as v_1 >= v_2 >= ...,
    it equals max_k v_k k h^n.
    """
    if not f_l1 > 0:
        raise MFCZInvalidParameter("||f||_1 must be positive")
    magnitude = np.abs(tf.values).reshape(-1)
    cell = tf.domain.cell_volume
    if lambdas is None:
        ordered = np.sort(magnitude)[::-1]
        counts = np.arange(1, ordered.size + 1)
        return float(np.max(ordered * counts) * cell / f_l1)
    lambdas = np.asarray(lambdas, dtype=float)
    measures = np.array([np.count_nonzero(magnitude > x) for x in lambdas]) * cell
    return float(np.max(lambdas * measures) / f_l1)


def spike_function(domain: TorusDomain) -> GridFunction:
    """Unit-mass spike at the grid point nearest the center."""
    values = np.zeros(domain.shape)
    values[(domain.points_per_dim // 2,) * domain.dim] = 1.0 / domain.cell_volume
    return GridFunction(domain, values)


def dust_function(domain: TorusDomain, rng, count=16, region=0.25) -> GridFunction:
    """Random positive masses on count random pixels of the central box of side region * L."""
    values = np.zeros(domain.shape)
    half = max(int(domain.points_per_dim * region / 2), 1)
    center = domain.points_per_dim // 2
    positions = rng.integers(center - half, center + half, size=(count, domain.dim))
    masses = rng.exponential(size=count)
    np.add.at(values, tuple(positions.T), masses / domain.cell_volume)
    return GridFunction(domain, values)


def dirichlet_function(domain: TorusDomain, theta: FrequencySet, width=0.125) -> GridFunction:
    """bump(x) * sum_j e^{i xi_j . x}, the bump of half-width width * L centered in the torus."""
    offsets = [x - domain.side_length / 2 for x in domain.mesh()]
    radius = np.sqrt(sum(x**2 for x in offsets)) / (width * domain.side_length)
    waves = sum(GridFunction.character(domain, freq).values for freq in theta.freqs)
    return GridFunction(domain, bump_profile(radius) * waves)


def family_functions(domain, theta, families, rng):
    """Generate (family, f) pairs for the requested families."""
    for family in families:
        match WeakTypeFamily(family):
            case WeakTypeFamily.SPIKES:
                yield WeakTypeFamily.SPIKES, spike_function(domain)
            case WeakTypeFamily.DUST:
                yield WeakTypeFamily.DUST, dust_function(domain, rng)
            case WeakTypeFamily.DIRICHLET:
                yield WeakTypeFamily.DIRICHLET, dirichlet_function(domain, theta)


@track_timing(timer_stats_collector)
def weak11_experiment(
    operator_factory,
    thetas,
    domain: TorusDomain,
    families=tuple(WeakTypeFamily),
    lambdas=None,
    seed=DEFAULT_SEED,
    band=WEAK_TYPE_SLOPE_BAND,
) -> WeakTypeReport:
    """Measure weak-type ratios of operator_factory(theta) for each theta in the sweep.

    Parameters
    ----------
    operator_factory : callable
        Builds the operator for a frequency set.
    thetas : list[FrequencySet]
        One frequency set per sweep point, already on the lattice of domain.
    domain : TorusDomain
    families : iterable of WeakTypeFamily
    lambdas : array-like | None
        Heights to scan; None computes the exact sup.
    seed : int
    band : tuple
        Slope band (low, high) the fitted exponent is compared with.

    """
    if not thetas:
        raise MFCZInvalidParameter("weak11_experiment needs at least one frequency set")
    families = list(families)
    if not families:
        raise MFCZInvalidParameter("the test family is empty")
    rng = np.random.default_rng(seed)
    rows = []
    for theta in thetas:
        operator = operator_factory(theta)
        for family, f in family_functions(domain, theta, families, rng):
            ratio = weak_type_ratio(operator.apply(f), lp_norm(f, 1), lambdas)
            rows.append({"N": theta.size, "family": family.value, "ratio": ratio})
            logger.debug("weak type N=%s family=%s ratio=%.6g", theta.size, family.value, ratio)
    table = pd.DataFrame(rows, columns=["N", "family", "ratio"])
    maxima = table.groupby("N", as_index=False)["ratio"].max()
    fit = None
    if len(maxima) >= 4:
        fit = fit_growth(maxima["N"], maxima["ratio"], variable="N", envelope=0.5)
    low, high = band
    return WeakTypeReport(
        table=table,
        maxima=maxima,
        fit=fit,
        upper_side_met=fit is not None and fit.exponent <= high,
        lower_side_met=fit is not None and fit.exponent >= low,
    )
