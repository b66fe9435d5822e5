import numpy as np
import pytest
from pydantic import ValidationError

from mfcz.exceptions import MFCZDimensionMismatch, MFCZInvalidParameter, MFCZResolutionError
from mfcz.grid.box_family import BoxFamily, maximal_function
from mfcz.grid.torus import (
    Box,
    GridFunction,
    TorusDomain,
    box_average,
    check_exponent,
    dft,
    idft,
    lp_norm,
    lp_norm_w,
)
from mfcz.tests.common import assert_close, make_test_domain, random_grid_function


def test_domain_properties(domain_1d):
    assert domain_1d.shape == (64,)
    assert domain_1d.num_points == 64
    assert_close(domain_1d.spacing, 2 * np.pi / 64)
    assert_close(domain_1d.frequency_spacing, 1.0)
    assert domain_1d.lattice_indices()[:3].tolist() == [0, 1, 2]
    assert domain_1d.lattice_indices()[-1] == -1
    assert_close(domain_1d.max_frequency, 32.0)


def test_domain_from_frequency_spacing():
    domain = TorusDomain.from_frequency_spacing(2, 0.25, 16)
    assert_close(domain.frequency_spacing, 0.25)
    assert_close(domain.side_length, 8 * np.pi)
    with pytest.raises(MFCZInvalidParameter):
        TorusDomain.from_frequency_spacing(1, 0.0, 16)


@pytest.mark.parametrize("kwargs", [{"dim": 3}, {"points_per_dim": 63}, {"side_length": -1.0}])
def test_domain_validation(kwargs):
    params = {"dim": 1, "side_length": 1.0, "points_per_dim": 64}
    params.update(kwargs)
    with pytest.raises(ValidationError):
        TorusDomain(**params)


def test_dft_is_unitary_and_invertible(domain_2d, rng):
    f = random_grid_function(domain_2d, rng, complex_values=True)
    f_hat = dft(f)
    assert_close(np.sum(np.abs(f_hat.values) ** 2), np.sum(np.abs(f.values) ** 2))
    assert_close(idft(f_hat).values, f.values)


def test_character_is_a_single_lattice_mode(domain_1d):
    f = GridFunction.character(domain_1d, -5.0)
    f_hat = np.abs(dft(f).values)
    assert np.argmax(f_hat) == domain_1d.fft_position(-5)
    assert_close(f_hat.max(), np.sqrt(64))
    assert_close(np.sum(f_hat**2), 64)


def test_character_dimension_mismatch(domain_2d):
    with pytest.raises(MFCZDimensionMismatch):
        GridFunction.character(domain_2d, 1.0)


def test_lp_norms_of_constants(domain_1d):
    f = GridFunction.constant(domain_1d, 2.0)
    assert_close(lp_norm(f, 1), 4 * np.pi)
    assert_close(lp_norm(f, 2), 2 * np.sqrt(2 * np.pi))
    assert lp_norm(f, np.inf) == 2.0
    assert_close(lp_norm_w(f, 2, np.ones(64)), lp_norm(f, 2))
    assert_close(lp_norm_w(f, 1, np.full(64, 3.0)), 3 * lp_norm(f, 1))


def test_lp_norm_w_rejects_negative_weights(domain_1d):
    f = GridFunction.constant(domain_1d)
    with pytest.raises(MFCZInvalidParameter):
        lp_norm_w(f, 2, -np.ones(64))
    with pytest.raises(MFCZDimensionMismatch):
        lp_norm_w(f, 2, np.ones(32))


@pytest.mark.parametrize("p", [0.5, float("nan"), None])
def test_check_exponent(p):
    with pytest.raises(MFCZInvalidParameter):
        check_exponent(p)


def test_check_exponent_inf():
    check_exponent(np.inf)
    with pytest.raises(MFCZInvalidParameter):
        check_exponent(np.inf, allow_inf=False)


def test_snap_frequencies(domain_1d):
    snapped, indices = domain_1d.snap_frequencies([[3.2], [-4.0]])
    assert indices.reshape(-1).tolist() == [3, -4]
    assert_close(snapped.reshape(-1), [3.0, -4.0])
    with pytest.raises(MFCZResolutionError):
        domain_1d.snap_frequencies([[40.0]])


def test_box_points_wrap_around(domain_1d):
    h = domain_1d.spacing
    points = Box((0.0,), 2 * h).points(domain_1d)
    assert points.size == 5
    assert_close(points.coords.reshape(-1), h * np.arange(-2, 3))
    assert sorted(points.axis_indices[0].tolist()) == [0, 1, 2, 62, 63]


def test_box_mask_and_measure(domain_2d):
    h = domain_2d.spacing
    box = Box((16 * h, 16 * h), 3 * h)
    assert np.count_nonzero(box.mask(domain_2d)) == 49
    assert_close(box.grid_measure(domain_2d), 49 * h**2)
    assert_close(box.measure, (6 * h) ** 2)
    assert box.dilate(2).radius == 6 * h


def test_box_errors(domain_1d):
    with pytest.raises(MFCZInvalidParameter):
        Box((0.0,), 0.0)
    with pytest.raises(MFCZResolutionError):
        Box((0.5 * domain_1d.spacing,), 0.1 * domain_1d.spacing).points(domain_1d)
    with pytest.raises(MFCZDimensionMismatch):
        Box((0.0, 0.0), 1.0).points(domain_1d)


def test_box_average(domain_1d, rng):
    f = random_grid_function(domain_1d, rng)
    box = Box((np.pi,), np.pi + domain_1d.spacing)
    assert_close(box_average(f, box, 2), np.sqrt(np.mean(f.values**2)))
    assert_close(box_average(f, box, np.inf), np.max(np.abs(f.values)))


@pytest.mark.parametrize(
    "center, radius",
    [((0.3,), 0.05), ((np.pi,), 0.4), ((6.2,), 1.0), ((1.0,), np.pi)],
)
def test_box_average_is_nondecreasing_in_p(domain_1d, rng, center, radius):
    box = Box(center, radius)
    exponents = [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0, 32.0, np.inf]
    for _ in range(20):
        f = random_grid_function(domain_1d, rng, complex_values=True)
        averages = np.array([box_average(f, box, p) for p in exponents])
        assert np.all(np.diff(averages) >= -1e-12 * averages[-1])


@pytest.mark.parametrize("dim, points", [(1, 64), (1, 250), (2, 32)])
def test_parseval(dim, points, rng):
    domain = make_test_domain(points, dim=dim)
    for _ in range(1000):
        f = random_grid_function(domain, rng, complex_values=True)
        norm = lp_norm(f, 2)
        assert abs(lp_norm(dft(f), 2) - norm) <= 1e-12 * norm


def test_grid_function_arithmetic(domain_1d):
    f = GridFunction.constant(domain_1d, 2.0)
    g = GridFunction.constant(domain_1d, 3.0)
    assert_close((f + g).values, 5.0)
    assert_close((f * g - 1).values, 5.0)
    assert_close((-f).values, -2.0)
    with pytest.raises(MFCZDimensionMismatch):
        f + GridFunction.constant(make_test_domain(32))
    with pytest.raises(MFCZDimensionMismatch):
        GridFunction(domain_1d, np.zeros(10))


def test_dyadic_family_structure(domain_1d):
    family = BoxFamily.dyadic(domain_1d)
    assert family.scales == [1, 2, 4, 8, 16, 32]
    assert len(family) == 2 * (2 + 4 + 8 + 16 + 32) + 64
    shallow = BoxFamily.dyadic(domain_1d, depth=2, shifted=False)
    assert shallow.scales == [16, 32]
    assert len(shallow) == 6
    assert len(list(shallow.boxes())) == 6


def test_layer_blocks_round_trip(domain_2d, rng):
    family = BoxFamily.dyadic(domain_2d, depth=1)
    f = random_grid_function(domain_2d, rng)
    for layer in family.layers:
        blocks = layer.to_blocks(f.values)
        assert blocks.shape == (4, 256)
        means = blocks.mean(axis=1)
        grid = layer.from_blocks(means, domain_2d.shape)
        assert_close(grid.mean(), f.values.mean())


def test_maximal_function_bounds(domain_1d, rng):
    family = BoxFamily.dyadic(domain_1d)
    f = random_grid_function(domain_1d, rng)
    maximal = maximal_function(f, family).values
    assert np.all(maximal >= np.abs(f.values) - 1e-12)
    assert np.all(maximal <= np.max(np.abs(f.values)) + 1e-12)
    constant = maximal_function(GridFunction.constant(domain_1d, 3.0), family).values
    assert_close(constant, 3.0)
