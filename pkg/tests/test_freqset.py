import numpy as np
import pytest

from mfcz.exceptions import (
    MFCZCardinalityError,
    MFCZDimensionMismatch,
    MFCZInvalidFile,
    MFCZInvalidParameter,
)
from mfcz.frequency.freqset import (
    FrequencySet,
    arithmetic_set,
    cluster_set,
    dist_to_set,
    dist_to_set_grid,
    parse_theta,
    sumset,
    sumset_growth_table,
)
from mfcz.tests.common import assert_close


def test_one_dimensional_sets_are_sorted():
    theta = FrequencySet([3.0, -1.0, 2.0])
    assert theta.values_1d().tolist() == [-1.0, 2.0, 3.0]
    assert theta.dim == 1
    assert theta.min_gaps().tolist() == [3.0, 1.0, 1.0]


@pytest.mark.parametrize("freqs", [[], [1.0, 1.0], [0.0, np.nan]])
def test_invalid_sets(freqs):
    with pytest.raises(MFCZInvalidParameter):
        FrequencySet(freqs)


def test_dimension_checks():
    with pytest.raises(MFCZDimensionMismatch):
        FrequencySet([[0.0, 1.0]], dim=3)
    planar = FrequencySet([[0.0, 1.0], [1.0, 0.0]], dim=2)
    with pytest.raises(MFCZDimensionMismatch):
        planar.values_1d()
    with pytest.raises(MFCZDimensionMismatch):
        dist_to_set([0.0], planar)


def test_parse_theta_presets():
    assert parse_theta("arith:4").values_1d().tolist() == [1.0, 2.0, 3.0, 4.0]
    assert parse_theta("arith:3:2").values_1d().tolist() == [2.0, 4.0, 6.0]
    assert parse_theta("random:5:7") == parse_theta("random:5:7")
    assert parse_theta("random:5:7:1").values_1d().max() < 1.0
    cluster = parse_theta("cluster:4:0.1")
    assert_close(cluster.values_1d(), [0.0, 0.1, 1.0, 1.1])


@pytest.mark.parametrize("text", ["arith", "arith:x", "cluster:4:0.6", "random:0:1"])
def test_parse_theta_bad_presets(text):
    with pytest.raises(MFCZInvalidParameter):
        parse_theta(text)


def test_parse_theta_from_file(tmp_path):
    filename = tmp_path / "theta.csv"
    filename.write_text("# planar frequencies\n0,0\n1,2\n-3,1\n")
    theta = parse_theta(str(filename))
    assert theta.dim == 2
    assert theta.size == 3
    with pytest.raises(MFCZInvalidFile):
        parse_theta(str(tmp_path / "missing.csv"))


def test_cluster_set_odd_count():
    assert cluster_set(3, 0.25).values_1d().tolist() == [0.0, 0.25, 1.0]


@pytest.mark.parametrize("count", [1, 2, 5, 9])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_arithmetic_sumset_is_arithmetic(count, k):
    theta = arithmetic_set(count)
    result = sumset(theta, k)
    assert result.size == k * (count - 1) + 1
    assert result.values_1d()[0] == k


def test_sumset_dedups_within_tolerance():
    theta = FrequencySet([0.0, 0.1, 0.2 + 1e-12])
    assert sumset(theta, 2).size == 5


def test_generic_sumset_is_large():
    theta = FrequencySet([0.0, 1.0, np.sqrt(2), np.pi])
    table = sumset_growth_table(theta, 3)
    assert table["k"].tolist() == [1, 2, 3]
    assert (table["cardinality"] == table["multiset_bound"]).all()
    assert table["trivial_bound"].tolist() == [4, 16, 64]
    assert table["arithmetic_count"].tolist() == [4, 7, 10]


@pytest.mark.parametrize("seed", range(200))
def test_sumset_meets_the_freiman_lower_bound(seed):
    rng = np.random.default_rng(seed)
    count = int(rng.integers(2, 13))
    if seed % 2:
        theta = FrequencySet(rng.choice(np.arange(4 * count), size=count, replace=False))
    else:
        theta = FrequencySet(rng.uniform(-10.0, 10.0, size=count))
    for k in (1, 2, 3):
        assert sumset(theta, k).size >= k * (count - 1) + 1


def test_sumset_cap():
    theta = arithmetic_set(10)
    with pytest.raises(MFCZCardinalityError):
        sumset(theta, 3, cap=50)
    with pytest.raises(MFCZInvalidParameter):
        sumset(theta, 0)


def test_planar_sumset():
    theta = FrequencySet([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], dim=2)
    assert sumset(theta, 2).size == 6


def test_dist_to_set():
    theta = FrequencySet([0.0, 4.0])
    assert dist_to_set(1.0, theta) == 1.0
    assert dist_to_set(3.0, theta) == 1.0
    assert dist_to_set(-2.0, theta) == 2.0
    grid = dist_to_set_grid(np.array([-1.0, 2.0, 5.0]), theta)
    assert grid.tolist() == [1.0, 2.0, 1.0]


def test_lattice_snapping(domain_1d):
    theta = FrequencySet([1.0, 2.0000000001])
    snapped = theta.on_lattice(domain_1d)
    assert snapped.values_1d().tolist() == [1.0, 2.0]
    assert snapped.lattice_indices(domain_1d).reshape(-1).tolist() == [1, 2]
    with pytest.raises(MFCZInvalidParameter):
        FrequencySet([1.0, 1.1]).on_lattice(domain_1d)
