import numpy as np
import pytest

from mfcz.exceptions import MFCZInvalidFile
from mfcz.grid.serialization import read_grid_function, write_grid_function
from mfcz.grid.torus import GridFunction
from mfcz.tests.common import make_test_domain, random_grid_function


@pytest.mark.parametrize("suffix", [".csv", ".bin"])
def test_complex_function_survives(tmp_path, domain_2d, rng, suffix):
    f = random_grid_function(domain_2d, rng, complex_values=True)
    filename = tmp_path / f"f{suffix}"
    write_grid_function(f, filename)
    g = read_grid_function(filename)
    assert g.domain == domain_2d
    np.testing.assert_allclose(g.values, f.values, rtol=1e-11)


def test_real_values_stay_real(tmp_path, domain_1d, rng):
    f = random_grid_function(domain_1d, rng)
    for name in ("f.csv", "f.bin"):
        write_grid_function(f, tmp_path / name)
        g = read_grid_function(tmp_path / name)
        assert g.is_real
        assert g.values.shape == (64,)


def test_binary_is_exact(tmp_path, rng):
    domain = make_test_domain(16, side_length=3.7)
    f = random_grid_function(domain, rng, complex_values=True)
    write_grid_function(f, tmp_path / "f.bin")
    assert (tmp_path / "f.bin").stat().st_size == 8 * (3 + 2 * 16)
    g = read_grid_function(tmp_path / "f.bin")
    assert g.domain.side_length == 3.7
    assert np.array_equal(g.values, f.values)


def test_csv_layout(tmp_path, domain_1d):
    write_grid_function(GridFunction.constant(domain_1d, 1.5), tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "dim,L,M"
    assert lines[1].startswith("1,") and lines[1].endswith(",64")
    assert lines[2] == "index,re,im"
    assert lines[3] == "0,1.5,0"
    assert len(lines) == 3 + 64


def test_unsupported_suffix(tmp_path, domain_1d):
    with pytest.raises(MFCZInvalidFile):
        write_grid_function(GridFunction.constant(domain_1d), tmp_path / "f.txt")
    (tmp_path / "f.txt").write_text("x")
    with pytest.raises(MFCZInvalidFile):
        read_grid_function(tmp_path / "f.txt")
    with pytest.raises(MFCZInvalidFile):
        read_grid_function(tmp_path / "missing.csv")


def test_bad_csv_files(tmp_path, domain_1d):
    filename = tmp_path / "f.csv"
    filename.write_text("a,b,c\n1,2,3\nindex,re,im\n")
    with pytest.raises(MFCZInvalidFile):
        read_grid_function(filename)

    write_grid_function(GridFunction.constant(domain_1d), filename)
    lines = filename.read_text().splitlines()
    filename.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(MFCZInvalidFile, match="declares 64"):
        read_grid_function(filename)

    lines[1] = "1,6.28,63"
    filename.write_text("\n".join(lines) + "\n")
    with pytest.raises(MFCZInvalidFile, match="invalid grid header"):
        read_grid_function(filename)


def test_truncated_binary(tmp_path, domain_1d):
    filename = tmp_path / "f.bin"
    write_grid_function(GridFunction.constant(domain_1d), filename)
    filename.write_bytes(filename.read_bytes()[:-16])
    with pytest.raises(MFCZInvalidFile):
        read_grid_function(filename)
    filename.write_bytes(b"\x00" * 8)
    with pytest.raises(MFCZInvalidFile):
        read_grid_function(filename)
