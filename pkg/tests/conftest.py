import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from emu import load_game

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture(scope="session")
def g1():
    return load_game(FIXTURES / "g1.game")


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES
