from pathlib import Path

import pytest

from helpers import two_cycle_graph

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def two_cycle():
    return two_cycle_graph()


@pytest.fixture
def golden():
    def load(name: str) -> str:
        return (GOLDEN / name).read_text()

    return load
