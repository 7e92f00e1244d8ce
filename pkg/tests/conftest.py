"""
Shared fixtures for the GPFP Toolkit tests.

Run from the project root:
    pytest tests/
"""
import sys
from pathlib import Path

import pytest

# Add project root to path
ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT))

from src.cli.schemas import load_spec_file  # noqa: E402
from src.core.dist_core import make_fgig, make_fp, make_shifted_semicircle, make_truncated_stable  # noqa: E402

SPECS_DIR = ROOT / "data" / "specs"


@pytest.fixture(scope="session")
def specs_dir():
    return SPECS_DIR


@pytest.fixture(scope="session")
def fp2():
    """Free Poisson law fp(2)."""
    return make_fp(2)


@pytest.fixture(scope="session")
def fgig():
    """fGIG(1, 4, 0): alpha1 = 2, alpha2 = 8."""
    return make_fgig(1, 4, 0)


@pytest.fixture(scope="session")
def semicircle():
    """Standard semicircle shifted to (1, 5)."""
    return make_shifted_semicircle(3)


@pytest.fixture(scope="session")
def truncated_stable():
    return make_truncated_stable(100, 4)


@pytest.fixture(scope="session")
def fp2_file_spec():
    return load_spec_file(SPECS_DIR / "fp2.json")


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch):
    monkeypatch.delenv("GPFP_THREADS", raising=False)
