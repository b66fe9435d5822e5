import pandas as pd
import pytest

import mfcz
from mfcz.data_models import EnumValue, MFCZEnum
from mfcz.exceptions import MFCZInvalidFile
from mfcz.experiments.registry import ExperimentType
from mfcz.experiments.span_experiments import LemmaSweep
from mfcz.sharp.sharp_maximal import ProjectionRegion
from mfcz.utils.files import compute_file_hash, dump_data, load_data
from mfcz.utils.timing import (
    STAT_COLUMNS,
    TimerStatsCollector,
    get_time_duration_string,
    timed_debug,
    timer_stats_collector,
    track_timing,
)
from mfcz.utils.utilities import make_table


def test_dump_and_load(tmp_path):
    data = {"seed": 3, "counts": [1, 2]}
    for name in ("data.json", "data.json5"):
        dump_data(data, tmp_path / name, indent=2)
        assert load_data(tmp_path / name) == data


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{seed: 3")
    with pytest.raises(MFCZInvalidFile, match="not valid"):
        load_data(bad)
    with pytest.raises(MFCZInvalidFile, match="unsupported extension"):
        dump_data({}, tmp_path / "data.yaml")


def test_compute_file_hash(tmp_path):
    for name in ("a.csv", "b.csv"):
        (tmp_path / name).write_text("N,constant\n1,1\n")
    (tmp_path / "c.csv").write_text("N,constant\n1,2\n")
    assert compute_file_hash(tmp_path / "a.csv") == compute_file_hash(tmp_path / "b.csv")
    assert compute_file_hash(tmp_path / "a.csv") != compute_file_hash(tmp_path / "c.csv")


@pytest.mark.parametrize(
    "seconds, expected",
    [(2.0, "2.000 s"), (0.0025, "2.500 ms"), (3e-6, "3.000 us"), (5e-9, "5.000 ns"), (0, "0 s")],
)
def test_time_duration_string(seconds, expected):
    assert get_time_duration_string(seconds) == expected


def test_timer_stats_collector():
    collector = TimerStatsCollector()

    @track_timing(collector)
    def square(x):
        return x * x

    assert square(3) == 9
    assert collector.get_stat("square") is None
    assert collector.to_dataframe().empty

    collector.enable()
    square(2)
    square(4)
    df = collector.to_dataframe()
    assert df.columns.tolist() == STAT_COLUMNS
    assert df["count"].tolist() == [2]
    assert df["total"].iloc[0] >= df["max"].iloc[0] >= df["min"].iloc[0] >= 0
    collector.log_stats(clear=True)
    assert collector.to_dataframe().empty


def test_timed_debug_keeps_the_function():
    @timed_debug
    def add(x, y):
        """Add two numbers."""
        return x + y

    assert add(1, 2) == 3
    assert add.__name__ == "add"
    assert add.__doc__ == "Add two numbers."


def test_make_table():
    table = make_table(pd.DataFrame({"N": [1, 2], "constant": [1.0, 1 / 3]}), title="span")
    text = table.get_string()
    assert "0.333333" in text
    assert "span" in text


class _Color(MFCZEnum):
    RED = "red", "A warm color"
    BLUE = EnumValue(value="blue", description="A cool color", wavelength=450)
    GREEN = ("green",)


def test_enum_members():
    assert _Color("red").description == "A warm color"
    assert _Color.BLUE.wavelength == 450
    assert _Color.GREEN.description is None
    assert _Color.values() == ["red", "blue", "green"]
    assert ExperimentType.LEMMA_SWEEP.experiment_class is LemmaSweep
    assert ProjectionRegion.TRIPLED.value == "tripled"


def test_package_exposes_the_shared_collector():
    assert mfcz.timer_stats_collector is timer_stats_collector
    assert isinstance(timer_stats_collector, TimerStatsCollector)
