import math

import numpy as np
import pytest

from mfcz.bochner.domains import (
    Annulus,
    Disk,
    DomainPreset,
    Square,
    make_planar_domain,
)
from mfcz.bochner.multiplier import (
    br_apply,
    br_symbol,
    decompose_scales,
    delta_p,
    kernel_norms,
    kernel_scaling,
    reconstruction_error,
    uj_norm_scan,
)
from mfcz.bochner.whitney import partition_of_unity, scale_count_slope, whitney_cover
from mfcz.exceptions import (
    MFCZDimensionMismatch,
    MFCZInvalidOperation,
    MFCZInvalidParameter,
    MFCZResolutionError,
)
from mfcz.grid.torus import GridFunction, TorusDomain
from mfcz.tests.common import TEST_SEED, assert_close, random_grid_function


def _lattice(points_per_dim=64, band=1.25):
    return TorusDomain.from_frequency_spacing(2, 2 * band / points_per_dim, points_per_dim)


@pytest.fixture(scope="module")
def lattice():
    return _lattice()


@pytest.fixture(scope="module")
def disk_cover(lattice):
    return whitney_cover(Disk(), lattice)


@pytest.fixture(scope="module")
def disk_decomposition(disk_cover):
    partition = partition_of_unity(disk_cover)
    return decompose_scales(br_symbol(Disk(), 1.0, partition=partition), partition)


@pytest.mark.parametrize(
    "n, p, expected",
    [(2, 2, 0.0), (2, 4, 0.0), (2, 1, 0.5), (2, np.inf, 0.5), (2, 6, 1 / 6), (3, 4, 0.25)],
)
def test_delta_p(n, p, expected):
    assert delta_p(n, p) == pytest.approx(expected)


@pytest.mark.parametrize("p", [1.5, 2, 3])
def test_delta_p_excluded_range(p):
    with pytest.raises(MFCZInvalidOperation):
        delta_p(3, p)


def test_delta_p_errors():
    with pytest.raises(MFCZInvalidParameter):
        delta_p(1.5, 4)
    with pytest.raises(MFCZInvalidParameter):
        delta_p(2, 0.5)


def test_planar_domains(lattice):
    for preset in DomainPreset:
        region = make_planar_domain(preset)
        assert region.name == preset.value
        assert region.lipschitz_constant(lattice) <= 1 + 1e-9
    assert Disk().contains(0.0, 0.0)
    assert not Annulus().contains(0.0, 0.0)
    assert Square().signed_distance(0.5, 0.0) == pytest.approx(0.5)
    assert Square().signed_distance(2.0, 2.0) == pytest.approx(-math.sqrt(2))
    with pytest.raises(MFCZInvalidParameter):
        Annulus(inner=1.0, outer=0.5)
    with pytest.raises(MFCZInvalidParameter):
        Disk(radius=1.3).check_resolved(lattice)
    with pytest.raises(MFCZDimensionMismatch):
        Disk().lattice_distance(TorusDomain(dim=1, side_length=1.0, points_per_dim=16))


def test_whitney_cover_is_disjoint_and_inside(lattice, disk_cover):
    assert len(disk_cover) > 0
    assert disk_cover.is_disjoint()
    distance = Disk().lattice_distance(lattice)
    assert np.all(distance[disk_cover.covered_mask()] > 0)
    assert not np.any(disk_cover.collar_mask() & disk_cover.covered_mask())


def test_box_distance():
    lower = np.array([[0.0, 0.0], [0.5, -0.25], [-2.0, -2.0]])
    upper = lower + 0.25
    disk = Disk().box_distance(lower, upper)
    assert_close(disk[:2], [1 - math.sqrt(0.125), 1 - math.hypot(0.75, 0.25)])
    assert disk[2] <= 0
    assert_close(Square().box_distance(lower, upper)[:2], [0.75, 0.25])
    assert np.all(Annulus().box_distance(lower, upper) <= 0)
    ring = Annulus().box_distance(np.array([[0.6, 0.0]]), np.array([[0.7, 0.1]]))
    assert_close(ring, [0.1])


@pytest.mark.parametrize("preset", DomainPreset.values())
def test_whitney_cubes_are_comparable_to_their_distance(lattice, preset):
    cover = whitney_cover(make_planar_domain(preset), lattice)
    low, high = cover.comparability_constants()
    # d(O_i, boundary) >= side / 4 = r / 2
    assert 0 < low <= high <= 2 + 1e-12
    assert high / low <= 8
    assert all(x.pixels >= 2 for x in cover.cubes)


def test_whitney_counts_grow_toward_the_boundary(disk_cover):
    table = disk_cover.count_table()
    assert table.columns.tolist() == ["j", "count", "scaled_count"]
    assert table["j"].tolist() == disk_cover.scales
    assert scale_count_slope(disk_cover) < 0
    smallest = disk_cover.scales[0]
    assert disk_cover.theta_j(smallest).size == len(disk_cover.cubes_at(smallest))
    assert disk_cover.theta_j(10) is None


def test_whitney_counts_double_per_scale():
    cover = whitney_cover(Disk(), _lattice(1024))
    table = cover.count_table().set_index("j")
    counts = table["count"]
    assert counts[-3] == 16
    assert counts[-4] == 32
    scales = list(range(-8, -2))
    assert abs(scale_count_slope(cover, scales) + 1) <= 0.2
    scaled = table.loc[scales, "scaled_count"]
    assert scaled.max() <= 4 * scaled.min()


def test_whitney_cover_errors(lattice):
    with pytest.raises(MFCZInvalidParameter):
        whitney_cover(Disk(), lattice, min_pixels=1)
    with pytest.raises(MFCZResolutionError):
        whitney_cover(Annulus(inner=0.99, outer=1.0), lattice)


def test_partition_of_unity(disk_cover):
    partition = partition_of_unity(disk_cover)
    assert len(partition) == len(disk_cover)
    total = partition.sum()
    assert_close(total[partition.total > 0], 1.0)
    assert np.all(total >= 0)
    assert np.all(partition.chi(0) <= 1.0)
    table = partition.derivative_table()
    assert table["j"].tolist() == disk_cover.scales
    assert np.all(np.isfinite(table["max_scaled_gradient"]))
    with pytest.raises(MFCZInvalidParameter):
        partition_of_unity(disk_cover, epsilon=0.0)


def test_disk_symbol(lattice):
    symbol = br_symbol(Disk(), 0.5)
    values = symbol.evaluate(lattice)
    assert values[0, 0] == 1.0
    distance = Disk().lattice_distance(lattice)
    assert np.all(values[distance <= 0] == 0)
    assert 1.0 <= symbol.profile_constant(lattice) <= 2**0.5
    f = GridFunction.constant(lattice, 3.0)
    assert_close(br_apply(symbol, f).values, 3.0)


def test_partition_symbol_on_the_square(lattice):
    cover = whitney_cover(Square(half_side=0.9), lattice)
    partition = partition_of_unity(cover)
    symbol = br_symbol(cover.region, 1.0, partition=partition)
    assert np.isfinite(symbol.profile_constant(lattice))
    assert np.max(symbol.evaluate(lattice)) <= 0.9 + 1e-12
    with pytest.raises(MFCZInvalidParameter):
        br_symbol(Square(), 1.0)
    with pytest.raises(MFCZInvalidParameter):
        br_symbol(Disk(), 0.0)
    with pytest.raises(MFCZDimensionMismatch):
        symbol.evaluate(_lattice(32))


def test_scale_decomposition_is_exact(disk_decomposition, lattice):
    assert disk_decomposition.exactness_error() < 1e-12
    assert disk_decomposition.collar_mass() >= 0
    rng = np.random.default_rng(TEST_SEED)
    f = random_grid_function(lattice, rng, complex_values=True)
    assert reconstruction_error(disk_decomposition, f) < 1e-10
    assert_close(disk_decomposition.sigma(10), 0.0)


def test_single_scale_symbols_are_bounded(disk_decomposition):
    # m <= 2 d and d < 14 2^j on the patches of scale j
    for j in disk_decomposition.scales:
        assert np.max(np.abs(disk_decomposition.sigma(j))) <= 28.0


def test_kernel_l2_norm_matches_the_symbol(disk_decomposition):
    j = disk_decomposition.scales[-1]
    norms = kernel_norms(disk_decomposition, j, s=1.5, min_decay_lengths=4)
    assert_close(norms.kernel_l2, norms.sigma_l2, rtol=1e-9)
    assert norms.num_cubes == disk_decomposition.counts[j]
    assert norms.tail_l2 >= norms.kernel_l2
    assert 0 <= norms.periodization <= 1
    assert norms.tail_ls > 0


def test_kernel_norms_errors(disk_decomposition):
    with pytest.raises(MFCZResolutionError):
        kernel_norms(disk_decomposition, -5)
    with pytest.raises(MFCZInvalidParameter):
        kernel_norms(disk_decomposition, -2, s=3, min_decay_lengths=4)


def test_kernel_scaling_table(disk_decomposition):
    report = kernel_scaling(disk_decomposition, disk_decomposition.scales, min_decay_lengths=4)
    assert report.table.columns.tolist() == [
        "j",
        "N_j",
        "sigma_l2",
        "sigma_sup",
        "K_l1",
        "K_l2",
        "M",
        "tail_l2",
        "tail_linf",
        "s",
        "tail_ls",
        "periodization",
    ]
    assert report.count_slope < 0
    with pytest.raises(MFCZInvalidParameter):
        kernel_scaling(
            disk_decomposition, [disk_decomposition.scales[-1], 10], min_decay_lengths=4
        )


def test_uj_norm_scan_exact_at_p2(disk_decomposition):
    scales = disk_decomposition.scales[-2:]
    table = uj_norm_scan(disk_decomposition, 2, 2, scales=scales + [10])
    assert table.columns.tolist() == [
        "j",
        "N_j",
        "norm",
        "kind",
        "scale_envelope",
        "mfcz_envelope",
        "scale_ratio",
        "mfcz_ratio",
    ]
    assert table["j"].tolist() == scales
    assert (table["kind"] == "exact").all()
    for row in table.itertuples():
        sigma = disk_decomposition.sigma(row.j)
        assert_close(row.norm, np.max(np.abs(sigma)))
        assert_close(row.scale_envelope, 2.0 ** (-row.j / 2))
    with pytest.raises(MFCZInvalidParameter):
        uj_norm_scan(disk_decomposition, 2, 0.5)
