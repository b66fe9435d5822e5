import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from mfcz.cli.experiments import parse_extra_args
from mfcz.cli.mfcz import cli
from mfcz.exceptions import MFCZInvalidExperiment
from mfcz.frequency.freqset import parse_theta
from mfcz.grid.serialization import read_grid_function, write_grid_function
from mfcz.grid.torus import GridFunction
from mfcz.mfcz_rc import MfczRuntimeConfig
from mfcz.operators.multifreq_operator import make_operator
from mfcz.sharp.sharp_maximal import SharpMaxConfig, sharp_maximal
from mfcz.tests.common import TEST_SEED, assert_close, make_test_domain, random_grid_function


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def grid_file(workdir):
    domain = make_test_domain(64)
    values = random_grid_function(domain, np.random.default_rng(TEST_SEED)).values.copy()
    values[20:24] = 15.0
    filename = workdir / "f.csv"
    write_grid_function(GridFunction(domain, values), filename)
    return filename


def _invoke(args):
    runner = CliRunner()
    return runner.invoke(cli, ["--no-prompts", "--no-timings", *map(str, args)])


def test_list(workdir):
    result = _invoke(["list"])
    assert result.exit_code == 0
    assert "delta-p-table" in result.stdout
    assert "br-kernel-scaling" in result.stdout


def test_run_delta_p_table(workdir):
    output_dir = workdir / "out"
    result = _invoke(["run", "delta-p-table", "-o", str(output_dir)])
    assert result.exit_code == 0
    report = json.loads((output_dir / "report.json").read_text())
    assert report["name"] == "delta-p-table"
    assert report["passed"]
    table = pd.read_csv(output_dir / "delta_p.csv")
    assert len(table) == 24


def test_preset_command_with_extra_args(workdir):
    output_dir = workdir / "sumsets"
    args = ["sumset-table", "-o", str(output_dir), "--counts", "2,3", "--k-max=2"]
    args += ["--set", "random_counts=4", "--random-k-max", "2", "--seed", "5"]
    result = _invoke(args)
    assert result.exit_code == 0
    report = json.loads((output_dir / "report.json").read_text())
    assert report["seed"] == 5
    assert report["parameters"]["counts"] == [2, 3]
    assert report["parameters"]["k_max"] == 2

    rerun = workdir / "rerun"
    result = _invoke(["run", "--from-report", output_dir / "report.json", "-o", rerun])
    assert result.exit_code == 0
    again = json.loads((rerun / "report.json").read_text())
    assert again["results"] == report["results"]


@pytest.mark.parametrize(
    "args, message",
    [
        (["run", "no-such-experiment"], "available experiments"),
        (["run", "delta-p-table", "--bogus", "1"], "unknown parameters"),
        (["run"], "experiment name"),
    ],
)
def test_run_errors(workdir, args, message):
    result = _invoke(args)
    assert result.exit_code == 1
    assert message in result.stderr


def test_config_create(isolated_home, workdir):
    result = _invoke(["config", "create", "--seed", "7", "-o", "results"])
    assert result.exit_code == 0
    assert (isolated_home / ".mfcz.json5").is_file()
    config = MfczRuntimeConfig.load()
    assert config.default_seed == 7
    assert str(config.output_dir) == "results"
    result = _invoke(["config", "show"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["default_seed"] == 7


def test_apply(grid_file, workdir):
    out = workdir / "g.csv"
    result = _invoke(["apply", "--op", "mfhilbert", "-t", "arith:4:2", "-i", grid_file, "-o", out])
    assert result.exit_code == 0
    f = read_grid_function(grid_file)
    expected = make_operator("mfhilbert", parse_theta("arith:4:2")).apply(f)
    assert_close(read_grid_function(out).values, expected.values, rtol=1e-9, atol=1e-9)


def test_apply_rejects_a_missing_file(workdir):
    result = _invoke(["apply", "-t", "arith:2", "-i", "missing.csv", "-o", "g.csv"])
    assert result.exit_code != 0


def test_decompose(grid_file, workdir):
    audit = workdir / "audit.json"
    result = _invoke(["decompose", "-i", grid_file, "-l", "3", "-t", "arith:2", "-a", audit])
    assert result.exit_code == 0
    report = json.loads(audit.read_text())
    assert report["boxes"]
    assert report["audit"]["reconstruction_error"] < 1e-10


def test_decompose_rejects_a_bad_height(grid_file, workdir):
    result = _invoke(["decompose", "-i", grid_file, "-l", "0", "-t", "arith:2"])
    assert result.exit_code == 1
    assert "MFCZInvalidParameter" in result.stderr


@pytest.mark.parametrize("region", [None, "box"])
def test_sharpmax(grid_file, workdir, region):
    out = workdir / "sharp.csv"
    args = ["sharpmax", "-i", grid_file, "-t", "arith:2", "--min-pixels", "4", "-o", out]
    result = _invoke(args if region is None else [*args, "--region", region])
    assert result.exit_code == 0
    f = read_grid_function(grid_file)
    kwargs = {} if region is None else {"region": region}
    cfg = SharpMaxConfig.dyadic(parse_theta("arith:2"), f.domain, min_pixels=4, **kwargs)
    expected = sharp_maximal(f, cfg)
    assert_close(read_grid_function(out).values, expected.values, rtol=1e-9, atol=1e-9)


def test_bump_constant(workdir):
    out = workdir / "bumps.csv"
    result = _invoke(["bump-constant", "-N", "1:4", "-o", out])
    assert result.exit_code == 0
    table = pd.read_csv(out)
    assert table["N"].tolist() == [1, 2, 3, 4]
    assert_close(table["constant"].to_numpy(), table["N"].to_numpy() * 4 / 27, rtol=1e-6)


def test_parse_extra_args():
    args = ["--points-per-dim", "512", "--trials=3", "--p", "-1"]
    assert parse_extra_args(args) == ["points_per_dim=512", "trials=3", "p=-1"]
    for bad in (["points"], ["--trials"], ["--"]):
        with pytest.raises(MFCZInvalidExperiment):
            parse_extra_args(bad)
