import numpy as np
import pytest

from mfcz.exceptions import MFCZInvalidOperation, MFCZInvalidParameter
from mfcz.frequency.freqset import FrequencySet, arithmetic_set
from mfcz.grid.torus import GridFunction
from mfcz.norms.envelopes import (
    arithmetic_exponent,
    corollary_exponent,
    envelope_table,
    fefferman_stein_exponent,
    pointwise_exponent,
    unweighted_exponent,
    weighted_exponent,
)
from mfcz.norms.growth import fit_growth
from mfcz.norms.power_method import (
    NormKind,
    estimate_norm,
    growth_regression,
    norm_2_exact,
    norm_p_power_method,
)
from mfcz.operators.multifreq_operator import (
    PointwiseMultiplication,
    convolution_operator,
    identity_operator,
    operator_from_symbol,
)
from mfcz.operators.symbols import mf_hilbert_symbol, zero_symbol
from mfcz.tests.common import assert_close
from mfcz.weights.weight import constant_weight, power_weight


def test_unweighted_exponent():
    assert unweighted_exponent(2) == 0.0
    assert unweighted_exponent(4) == 0.25
    assert unweighted_exponent(4 / 3) == pytest.approx(0.25)
    assert unweighted_exponent(np.inf) == 0.5
    with pytest.raises(MFCZInvalidParameter):
        unweighted_exponent(0.5)


def test_weighted_exponents():
    assert weighted_exponent(4, 1, 2) == 1.0
    assert weighted_exponent(6, 1, 3) == pytest.approx(1 + 1 / 6)
    assert corollary_exponent(4, 1, 2) == 1.0
    assert arithmetic_exponent(6, 1, 3) == pytest.approx(6 / 9 + 1 / 6)
    assert fefferman_stein_exponent(4, 1, 2) == 1.0
    assert fefferman_stein_exponent(6, 2, 1.5) == pytest.approx(8 * 2 / 3)
    assert pointwise_exponent(2) == 0.0
    assert pointwise_exponent(4) == 0.25
    with pytest.raises(MFCZInvalidParameter):
        corollary_exponent(4, 1, 1.5)
    with pytest.raises(MFCZInvalidParameter):
        weighted_exponent(1, 1, 2)
    with pytest.raises(MFCZInvalidParameter):
        pointwise_exponent(1)


def test_envelope_table():
    table = envelope_table(4, 1, 3)
    assert table["name"].tolist() == [
        "unweighted",
        "weighted",
        "corollary",
        "arithmetic",
        "fefferman_stein",
        "trivial",
    ]
    flags = dict(zip(table["name"], table["interesting"]))
    assert flags["unweighted"]
    assert not flags["trivial"]
    assert "corollary" not in envelope_table(4, 1, 1.5)["name"].tolist()


def test_fit_growth():
    n = np.array([2, 4, 8, 16, 32])
    fit = fit_growth(n, 3 * n**0.5, envelope=0.5)
    assert_close(fit.exponent, 0.5)
    assert_close(fit.constant, 3.0)
    assert_close(fit.r_squared, 1.0)
    assert_close(fit.envelope_constant, 3.0)
    flat = fit_growth(n, np.ones(5))
    assert flat.exponent == 0.0
    degenerate = fit_growth([4] * 4, [1.0, 2.0, 3.0, 4.0])
    assert degenerate.degenerate
    assert np.isnan(degenerate.exponent)


@pytest.mark.parametrize(
    "x, y", [([1, 2, 3], [1, 2, 3]), ([1, 2, 3, 4], [1, 0, 3, 4]), ([1, 2], [1, 2, 3])]
)
def test_fit_growth_errors(x, y):
    with pytest.raises(MFCZInvalidParameter):
        fit_growth(x, y)


def test_norm_2_exact(domain_1d):
    operator = operator_from_symbol(mf_hilbert_symbol(FrequencySet([1.0, 4.0])))
    estimate = norm_2_exact(operator, domain_1d)
    assert estimate.kind == NormKind.EXACT
    assert estimate.value == 1.0
    assert estimate.extremizer is not None
    factor = GridFunction.constant(domain_1d, 2.0)
    with pytest.raises(MFCZInvalidOperation):
        norm_2_exact(PointwiseMultiplication(factor), domain_1d)


def test_norm_of_the_zero_symbol(domain_1d):
    assert norm_2_exact(operator_from_symbol(zero_symbol()), domain_1d).value == 0.0


def test_estimate_norm_dispatch(domain_1d):
    operator = identity_operator()
    assert estimate_norm(operator, domain_1d, 2).kind == NormKind.EXACT
    estimate = estimate_norm(operator, domain_1d, 3, restarts=0)
    assert estimate.kind == NormKind.LOWER_BOUND
    assert_close(estimate.value, 1.0)


def test_gaussian_convolution_norm_is_its_integral(domain_1d):
    def gaussian(offsets, domain):
        return np.exp(-4 * offsets[0] ** 2)

    operator = convolution_operator(gaussian)
    offsets = domain_1d.torus_offset(domain_1d.coordinates(), 0.0)
    total = float(np.sum(gaussian([offsets], domain_1d)) * domain_1d.spacing)
    for p in (1.5, 3.0):
        estimate = norm_p_power_method(operator, domain_1d, p, restarts=2)
        assert_close(estimate.value, total, rtol=1e-9)


def test_power_method_history_never_decreases(domain_1d):
    operator = operator_from_symbol(mf_hilbert_symbol(FrequencySet([1.0, 4.0, 9.0])))
    estimate = norm_p_power_method(operator, domain_1d, 4, restarts=2, max_iter=50)
    history = np.array(estimate.history)
    assert np.all(np.diff(history) >= -1e-12 * history[:-1])
    assert estimate.value >= 1.0 - 1e-9
    assert estimate.starts == 2 + 1 + 4 + 2


def test_power_method_for_pointwise_multiplication(domain_1d):
    values = 1.0 + np.cos(domain_1d.coordinates()) ** 2
    operator = PointwiseMultiplication(GridFunction(domain_1d, values))
    estimate = norm_p_power_method(operator, domain_1d, 3, restarts=1)
    assert values[32] - 1e-12 <= estimate.value <= values.max() + 1e-12


def test_weighted_power_method(domain_1d):
    operator = identity_operator()
    estimate = norm_p_power_method(
        operator, domain_1d, 3, weight=power_weight(domain_1d, 0.5), restarts=0
    )
    assert estimate.weighted
    assert_close(estimate.value, 1.0)
    zero = np.ones(64)
    zero[0] = 0.0
    with pytest.raises(MFCZInvalidParameter):
        norm_p_power_method(operator, domain_1d, 3, weight=zero)
    with pytest.raises(MFCZInvalidParameter):
        norm_p_power_method(operator, domain_1d, 1)


def test_growth_regression_for_the_identity(domain_1d):
    thetas = [arithmetic_set(n) for n in (1, 2, 4, 8)]
    report = growth_regression(identity_operator, thetas, domain_1d, 3, restarts=0)
    assert_close(report.exponent, 1 / 6)
    assert report.interesting
    assert report.table.columns.tolist() == ["N", "estimate", "envelope", "ratio"]
    assert_close(report.table["estimate"].to_numpy(), 1.0)
    assert report.within_envelope
    assert abs(report.fit.exponent) < 1e-9


def test_growth_regression_weighted(domain_1d):
    thetas = [arithmetic_set(n) for n in (1, 2, 4, 8)]
    weight = constant_weight(domain_1d, 2.0)
    report = growth_regression(
        identity_operator, thetas, domain_1d, 4, weight=weight, t=1, s=2, restarts=0
    )
    assert report.exponent == 1.0
    assert not report.interesting
    with pytest.raises(MFCZInvalidParameter):
        growth_regression(identity_operator, thetas, domain_1d, 4, weight=weight)
    with pytest.raises(MFCZInvalidParameter):
        growth_regression(identity_operator, thetas[:3], domain_1d, 4)
