import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from cbc.config import parse_config
from cbc.pipeline import prepare, synthesize

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def load_case(name, tmp_root=None):
    cfg = parse_config(CONFIGS / f"{name}.toml")
    if tmp_root is not None:
        cfg = cfg.with_overrides(out_dir=Path(tmp_root) / name)
    return cfg


@pytest.fixture(scope="session")
def jet_cfg(tmp_path_factory):
    return load_case("jet", tmp_path_factory.mktemp("out"))


@pytest.fixture(scope="session")
def lorenz_cfg(tmp_path_factory):
    return load_case("lorenz", tmp_path_factory.mktemp("out"))


@pytest.fixture(scope="session")
def jet_prep(jet_cfg):
    return prepare(jet_cfg)


@pytest.fixture(scope="session")
def lorenz_prep(lorenz_cfg):
    return prepare(lorenz_cfg)


@pytest.fixture(scope="session")
def jet_solution(jet_cfg, jet_prep):
    return synthesize(jet_cfg, jet_prep)


@pytest.fixture(scope="session")
def lorenz_solution(lorenz_cfg, lorenz_prep):
    return synthesize(lorenz_cfg, lorenz_prep)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][2:])):
            terminalreporter.write_line(line)
