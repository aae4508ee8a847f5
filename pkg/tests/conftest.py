import json
from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def golden():
    return json.loads((GOLDEN / "values.json").read_text())


@pytest.fixture
def golden_dir():
    return GOLDEN
