import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CASES = Path(__file__).parent.parent / "cases"


@pytest.fixture(scope="session")
def ieee118_path() -> Path:
    return CASES / "ieee118.json"


@pytest.fixture(scope="session")
def demo5_path() -> Path:
    return CASES / "demo5.json"


@pytest.fixture(scope="session")
def two_bus_path() -> Path:
    return CASES / "two_bus.json"


@pytest.fixture(scope="session")
def chain3_path() -> Path:
    return CASES / "chain3.json"
