"""Test configuration, path setup and shared fixtures for the concordance tests."""

import sys
from pathlib import Path

import pytest

# Repository root, so tests import the package as concordance.src
ROOT_DIR = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(ROOT_DIR))

from concordance.src.problem_file import load_problem_file  # noqa: E402
from concordance.src.resources import get_fixture_path  # noqa: E402
from concordance.src.seifert_knot import SeifertMatrix  # noqa: E402
from concordance.src.settings import Settings  # noqa: E402


@pytest.fixture
def settings() -> Settings:
    """Default settings, independent of settings.yaml."""
    return Settings()


@pytest.fixture
def trefoil() -> SeifertMatrix:
    """Right-handed trefoil."""
    return SeifertMatrix.of([[-1, 1], [0, -1]])


@pytest.fixture
def nine_forty_six() -> SeifertMatrix:
    """The pretzel knot 9_46."""
    return SeifertMatrix.of([[0, 1], [2, 0]])


@pytest.fixture
def load_fixture():
    """Load a bundled problem file by name."""

    def _load(name: str):
        return load_problem_file(get_fixture_path(name))

    return _load
