import os
import sys

import pytest

# The app modules import each other by plain name, as when run from app/
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from netlist import NetlistBuilder  # noqa: E402


@pytest.fixture
def builder():
    return NetlistBuilder()
