import numpy as np
import pytest

from mfcz.exceptions import MFCZDimensionMismatch, MFCZInvalidParameter
from mfcz.frequency.freqset import FrequencySet, arithmetic_set
from mfcz.grid.torus import Box, GridFunction
from mfcz.operators.functionals import (
    frequency_bins,
    lq_aggregate,
    modulated_lq_functional,
    rubio_functional,
)
from mfcz.operators.multifreq_operator import (
    BumpFamily,
    OperatorPreset,
    PointwiseMultiplication,
    bump_family_cubes,
    bump_sum_operator,
    convolution_operator,
    identity_operator,
    kernel_regularity,
    kernel_to_symbol,
    make_operator,
    modulated_operator,
    operator_from_symbol,
    symbol_to_kernel,
    theta_cubes,
)
from mfcz.operators.symbols import (
    HormanderProfile,
    bump_constant,
    hormander_symbol,
    identity_symbol,
    mf_hilbert_symbol,
    plateau_profile,
    symbol_derivative_table,
)
from mfcz.tests.common import (
    assert_close,
    lattice_theta,
    make_test_domain,
    random_grid_function,
    trig_polynomial,
)


def _at(values, domain, index):
    return values[domain.fft_position(index)]


def test_mf_hilbert_symbol_values(domain_1d):
    values = mf_hilbert_symbol(FrequencySet([2.0, 5.0])).evaluate(domain_1d)
    expected = {-10: -1, 1: -1, 2: 1, 4: 1, 5: -1, 20: -1}
    for index, value in expected.items():
        assert _at(values, domain_1d, index) == value


def test_mf_hilbert_symbol_with_odd_count(domain_1d):
    values = mf_hilbert_symbol([0.0, 3.0, 7.0]).evaluate(domain_1d)
    assert _at(values, domain_1d, -1) == -1
    assert _at(values, domain_1d, 5) == -1
    assert _at(values, domain_1d, 7) == 1
    with pytest.raises(MFCZInvalidParameter):
        mf_hilbert_symbol([3.0, 1.0])


def test_mf_hilbert_symbol_on_characters(domain_1d):
    operator = operator_from_symbol(mf_hilbert_symbol(FrequencySet([2.0, 5.0])))
    inside = GridFunction.character(domain_1d, 3.0)
    outside = GridFunction.character(domain_1d, 9.0)
    assert_close(operator.apply(inside).values, inside.values)
    assert_close(operator.apply(outside).values, -outside.values)


def test_mf_hilbert_symbol_rejects_planar_domains(domain_2d):
    with pytest.raises(MFCZDimensionMismatch):
        mf_hilbert_symbol(FrequencySet([1.0])).evaluate(domain_2d)


def test_hormander_symbol_localization(domain_1d):
    theta = FrequencySet([0.0, 8.0])
    values = hormander_symbol(theta, profile=HormanderProfile.BUMP).evaluate(domain_1d)
    assert _at(values, domain_1d, 0) == 1.0
    assert _at(values, domain_1d, 8) == 1.0
    assert _at(values, domain_1d, 4) == 0.0
    assert np.max(np.abs(values)) <= 1.0

    odd = hormander_symbol(theta).evaluate(domain_1d)
    assert _at(odd, domain_1d, 0) == 0.0
    assert np.real(_at(odd, domain_1d, 1)) > 0 > np.real(_at(odd, domain_1d, -1))


def test_hormander_derivative_check():
    domain = make_test_domain(256)
    symbol = hormander_symbol(FrequencySet([0.0]), profile=HormanderProfile.ODD)
    check, table = symbol_derivative_table(symbol, domain)
    assert len(check.constants) == 2
    assert 0 < check.constants[0] < 1
    assert check.min_distance == 4.0
    assert {"d_order1", "scaled1", "d_order2", "scaled2"} <= set(table.columns)
    with pytest.raises(MFCZInvalidParameter):
        symbol_derivative_table(identity_symbol(), domain)


def test_plateau_profile():
    values = plateau_profile(np.array([0.0, 0.5, 0.75, 1.0, 2.0]))
    assert values[0] == 1.0 and values[1] == 1.0
    assert_close(values[2], 0.5)
    assert values[3] == 0.0 and values[4] == 0.0


def test_bump_constant_for_equal_radii():
    # sup_u u^2 / (1 + u)^3 = 4 / 27 at u = 2
    assert_close(bump_constant([1.0], 1), 4 / 27, rtol=1e-6)
    assert_close(bump_constant([0.5] * 6, 1), 6 * 4 / 27, rtol=1e-6)


def test_bump_constant_for_dyadic_radii_is_bounded():
    short = bump_constant(2.0 ** np.arange(20), 1)
    long = bump_constant(2.0 ** np.arange(40), 1)
    assert long < 3.5
    assert_close(long, short, rtol=1e-2)


def test_bump_constant_errors():
    with pytest.raises(MFCZInvalidParameter):
        bump_constant([], 1)
    with pytest.raises(MFCZInvalidParameter):
        bump_constant([1.0, -1.0], 1)
    with pytest.raises(MFCZInvalidParameter):
        bump_constant([1.0], 1, decay=2)


@pytest.mark.parametrize("family", [x.value for x in BumpFamily])
def test_bump_families_are_disjoint(family):
    cubes = bump_family_cubes(family, 6)
    assert len(cubes) == 6
    operator = bump_sum_operator(cubes)
    assert operator.theta.size == 6
    assert len(operator.pieces) == 6
    assert sorted(operator.metadata["radii"]) == (
        [1.0] * 6 if family == "equal" else [2.0**k for k in range(6)]
    )


def test_bump_family_layout():
    equal = bump_family_cubes(BumpFamily.EQUAL, 3, radius=0.5, dim=2)
    assert [x.center for x in equal] == [(0.0, 0.0), (1.5, 0.0), (3.0, 0.0)]
    dyadic = bump_family_cubes(BumpFamily.DYADIC_POINT, 3)
    assert [x.radius for x in dyadic] == [1.0, 2.0, 4.0]
    assert [x.center[0] for x in dyadic] == [3.0, 6.0, 12.0]
    with pytest.raises(MFCZInvalidParameter):
        bump_family_cubes(BumpFamily.EQUAL, 0)


def test_bump_constant_grows_only_for_equal_radii():
    equal = [
        bump_sum_operator(bump_family_cubes("equal", n)).metadata["bump_constant"]
        for n in (8, 16)
    ]
    dyadic = [
        bump_sum_operator(bump_family_cubes("dyadic_point", n)).metadata["bump_constant"]
        for n in (8, 16)
    ]
    assert_close(equal[1] / equal[0], 2.0, rtol=1e-6)
    assert dyadic[1] / dyadic[0] < 1.1


def test_bump_sum_operator_errors():
    with pytest.raises(MFCZInvalidParameter, match="overlap"):
        bump_sum_operator([Box((0.0,), 1.0), Box((1.0,), 1.0)])
    with pytest.raises(MFCZInvalidParameter):
        bump_sum_operator([])
    with pytest.raises(MFCZDimensionMismatch):
        bump_sum_operator([Box((0.0,), 1.0), Box((5.0, 0.0), 1.0)])


def test_bump_sum_operator_acts_on_cube_centers():
    domain = make_test_domain(128)
    operator = bump_sum_operator([((8.0,), 4.0), ((20.0,), 4.0)])
    f = trig_polynomial(domain, lattice_theta([8, 14, 20], domain), [1.0, 1.0, 1.0])
    expected = trig_polynomial(domain, lattice_theta([8, 20], domain), [1.0, 1.0])
    assert_close(operator.apply(f).values, expected.values, atol=1e-12)


def test_theta_cubes():
    cubes = theta_cubes(FrequencySet([0.0, 2.0, 6.0]))
    assert [x.radius for x in cubes] == [1.0, 1.0, 2.0]
    assert [x.center for x in cubes] == [(0.0,), (2.0,), (6.0,)]
    with pytest.raises(MFCZInvalidParameter):
        theta_cubes(FrequencySet([1.0]))


@pytest.mark.parametrize("preset", [x.value for x in OperatorPreset])
def test_make_operator(domain_1d, rng, preset):
    theta = arithmetic_set(4, step=4.0)
    operator = make_operator(preset, theta)
    assert operator.theta == theta
    f = random_grid_function(domain_1d, rng)
    assert operator.apply(f).values.shape == (64,)


def test_modulated_identity_is_identity(domain_1d, rng):
    operator = modulated_operator(identity_operator(), arithmetic_set(3))
    assert len(operator.pieces) == 3
    assert_close(operator.symbol(domain_1d), 1.0)
    f = random_grid_function(domain_1d, rng)
    assert_close(operator.apply(f).values, f.values)


def test_modulated_operator_shifts_the_symbol(domain_1d):
    base = operator_from_symbol(mf_hilbert_symbol([0.0]))
    operator = modulated_operator(base, FrequencySet([4.0]))
    values = operator.symbol(domain_1d)
    assert _at(values, domain_1d, 3) == -1
    assert _at(values, domain_1d, 4) == 1


def test_adjoint_and_pointwise(domain_1d, rng):
    theta = FrequencySet([0.0, 8.0])
    operator = make_operator(OperatorPreset.HORMANDER, theta)
    f = random_grid_function(domain_1d, rng, complex_values=True)
    g = random_grid_function(domain_1d, rng, complex_values=True)
    left = np.vdot(g.values, operator.apply(f).values)
    right = np.vdot(operator.adjoint().apply(g).values, f.values)
    assert_close(left, right, rtol=1e-9)

    factor = GridFunction.constant(domain_1d, 2.0)
    pointwise = PointwiseMultiplication(factor)
    assert not pointwise.is_multiplier
    assert_close(pointwise.apply(f).values, 2 * f.values)


def test_convolution_round_trip(domain_1d):
    def gaussian(offsets, domain):
        return np.exp(-(offsets[0] ** 2))

    symbol = kernel_to_symbol(gaussian)
    offsets = domain_1d.torus_offset(domain_1d.coordinates(), 0.0)
    assert_close(np.real(symbol_to_kernel(symbol, domain_1d)), gaussian([offsets], domain_1d))

    operator = convolution_operator(gaussian)
    total = np.sum(gaussian([offsets], domain_1d)) * domain_1d.spacing
    result = operator.apply(GridFunction.constant(domain_1d, 1.0))
    assert_close(result.values, total, rtol=1e-9)


def test_kernel_regularity_is_bounded():
    domain = make_test_domain(512)
    operator = bump_sum_operator(bump_family_cubes("dyadic_point", 4, radius=2.0))
    check = kernel_regularity(operator, domain)
    assert check.constant > 0
    assert np.isfinite(check.constant)
    assert check.bump_constant == operator.metadata["bump_constant"]
    with pytest.raises(MFCZInvalidParameter):
        kernel_regularity(identity_operator(), domain)


def test_lq_aggregate():
    stack = np.array([[3.0, 0.0], [4.0, 0.0]])
    assert_close(lq_aggregate(stack, 2), [5.0, 0.0])
    assert_close(lq_aggregate(stack, 1), [7.0, 0.0])
    assert_close(lq_aggregate(stack, np.inf), [4.0, 0.0])


def test_modulated_lq_functional(domain_1d, rng):
    f = random_grid_function(domain_1d, rng)
    result = modulated_lq_functional(identity_operator(), arithmetic_set(4), f, 2)
    assert_close(result.values, 2 * np.abs(f.values))
    with pytest.raises(MFCZInvalidParameter):
        modulated_lq_functional(identity_operator(), arithmetic_set(4), f, 0.5)


def test_rubio_functional(domain_1d, rng):
    theta = FrequencySet([2.0, 5.0])
    assert frequency_bins(theta, domain_1d)[domain_1d.fft_position(5)] == 2
    f = trig_polynomial(domain_1d, lattice_theta([1, 3, 6], domain_1d), [1.0, 2.0, 3.0])
    assert_close(rubio_functional(theta, f, 2).values, np.sqrt(14.0))
    assert_close(rubio_functional(theta, f, np.inf).values, 3.0)

    g = random_grid_function(domain_1d, rng)
    assert_close(rubio_functional(None, g, 2).values, np.abs(g.values))
