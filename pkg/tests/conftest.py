import sys
from pathlib import Path

import pytest

from shapegen import parse_spec

ROOT = Path(__file__).resolve().parent.parent
SPECS = ROOT / "specs"

sys.path.insert(0, str(Path(__file__).resolve().parent))


@pytest.fixture(scope="session")
def pulse_path() -> Path:
    return SPECS / "pulse.sexp"


@pytest.fixture(scope="session")
def ecg_path() -> Path:
    return SPECS / "ecg.sexp"


@pytest.fixture(scope="session")
def pulse_spec(pulse_path):
    return parse_spec(pulse_path.read_text())


@pytest.fixture(scope="session")
def ecg_spec(ecg_path):
    return parse_spec(ecg_path.read_text())
