import json
import math
from pathlib import Path

import pytest

from deltacut import RobotGeometry

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def g0() -> RobotGeometry:
    # Reference sizing: equilateral base side 200*sqrt(3) and effector side
    # 60*sqrt(3) make the offsets come out to exactly 100 and 30 mm.
    return RobotGeometry(
        f=200.0 * math.sqrt(3.0), e=60.0 * math.sqrt(3.0), r_f=150.0, r_e=350.0
    )


def load_fixture(name: str):
    with open(FIXTURES / name, "r", encoding="utf-8") as fh:
        return json.load(fh)
