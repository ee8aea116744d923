import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from hilbert import StateVector, pauli  # noqa: E402
from scenario import load_scenario  # noqa: E402

SCENARIOS = ROOT / "scenarios"


@pytest.fixture
def scenario_path():
    def path(name):
        return SCENARIOS / f"{name}.json"
    return path


@pytest.fixture
def stern_gerlach():
    return load_scenario(SCENARIOS / "stern_gerlach.json")


@pytest.fixture
def eigenstate():
    return load_scenario(SCENARIOS / "eigenstate.json")


@pytest.fixture
def thirds():
    return load_scenario(SCENARIOS / "thirds.json")


@pytest.fixture
def sigma_x():
    return pauli("x")


@pytest.fixture
def sigma_z():
    return pauli("z")


@pytest.fixture
def e1():
    return StateVector.basis_state(2, 0)


@pytest.fixture
def e2():
    return StateVector.basis_state(2, 1)


@pytest.fixture
def plus():
    return StateVector(np.array([1.0, 1.0]) / np.sqrt(2.0))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("PAQS_MAX_CLOSURE", "PAQS_MAX_DIM", "PAQS_DB_PATH", "PAQS_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
