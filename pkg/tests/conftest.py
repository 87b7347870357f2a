import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from config import ToleranceConfig  # noqa: E402
from modforms import eigenform  # noqa: E402


@pytest.fixture(scope="session")
def cfg():
    return ToleranceConfig()


@pytest.fixture(scope="session")
def delta():
    return eigenform(12, 2000)


@pytest.fixture(scope="session")
def forms():
    return {k: eigenform(k, 2000) for k in (12, 16, 18, 20, 22, 26)}


@pytest.fixture(autouse=True)
def _isolated_home(tmp_path, monkeypatch):
    monkeypatch.setenv("HOME", str(tmp_path))
    monkeypatch.delenv("RTF_PRECISION", raising=False)
