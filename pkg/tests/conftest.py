import numpy as np
import pytest

from mfcz.tests.common import TEST_SEED, make_test_domain


@pytest.fixture
def rng():
    return np.random.default_rng(TEST_SEED)


@pytest.fixture
def domain_1d():
    return make_test_domain(64)


@pytest.fixture
def domain_2d():
    return make_test_domain(32, dim=2)


@pytest.fixture(autouse=True)
def isolated_home(tmp_path, monkeypatch):
    """Keep tests away from a real ~/.mfcz.json5."""
    home = tmp_path / "home"
    home.mkdir()
    monkeypatch.setenv("HOME", str(home))
    return home
