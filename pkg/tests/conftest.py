import numpy as np
import pytest

from susy_chain.core.chain import BacklundChain
from susy_chain.core.seeds import SeedSpec
from susy_chain.infra.chain_config import ChainConfig
from susy_chain.infra.settings import SettingsLoader


@pytest.fixture(autouse=True)
def isolated_dirs(tmp_path, monkeypatch):
    settings = SettingsLoader()
    monkeypatch.setitem(settings._config, "output_dir", str(tmp_path / "output"))
    monkeypatch.setitem(settings._config, "logs_dir", str(tmp_path / "logs"))
    return tmp_path


@pytest.fixture
def regular_pair() -> BacklundChain:
    """S(κ=1) + R(κ=0.5), both centred at 0: the regular two-level chain."""
    return BacklundChain([SeedSpec("S", 1.0, 0.0), SeedSpec("R", 0.5, 0.0)])


@pytest.fixture
def three_soliton() -> BacklundChain:
    return BacklundChain(
        [SeedSpec("R", 0.5, 0.0), SeedSpec("S", 1.0, 0.0), SeedSpec("R", 1.5, 0.0)]
    )


@pytest.fixture
def pt_well() -> BacklundChain:
    return BacklundChain([SeedSpec("R", 1.0, 0.0)])


@pytest.fixture
def default_config() -> ChainConfig:
    return ChainConfig.default()


@pytest.fixture
def window_10pi() -> np.ndarray:
    return np.linspace(-5 * np.pi, 5 * np.pi, 4001)
