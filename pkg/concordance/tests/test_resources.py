"""Tests for the resources module (path resolution for dev and frozen contexts)."""

import os
from unittest.mock import patch

import pytest

from concordance.src.resources import (_get_fixtures_dir_impl,
                                       _get_settings_yaml_path_impl,
                                       get_fixture_path, get_fixtures_dir,
                                       get_settings_yaml_path, list_fixtures)

# Path to concordance/src (where resources.py lives)
SRC_DIR = os.path.normpath(os.path.join(os.path.dirname(__file__), "..", "src"))


@pytest.fixture(autouse=True)
def _clear_lru_caches():
    """Clear lru_cache on every public getter so tests don't pollute each other."""
    get_settings_yaml_path.cache_clear()
    get_fixtures_dir.cache_clear()
    yield
    get_settings_yaml_path.cache_clear()
    get_fixtures_dir.cache_clear()


# ── Development / installed context (no _MEIPASS) ──────────────────────────


@pytest.mark.unit
class TestDevContext:
    """Path resolution when running from source (no PyInstaller)."""

    def test_settings_yaml_path(self):
        result = _get_settings_yaml_path_impl()
        assert result == os.path.normpath(os.path.join(SRC_DIR, "..", "settings.yaml"))
        assert os.path.isfile(result), f"settings.yaml not found at {result}"

    def test_fixtures_dir(self):
        result = _get_fixtures_dir_impl()
        assert result == os.path.normpath(os.path.join(SRC_DIR, "..", "fixtures"))
        assert os.path.isdir(result), f"fixtures dir not found at {result}"


# ── Frozen (PyInstaller) context ────────────────────────────────────────────


@pytest.mark.unit
class TestFrozenContext:
    """Path resolution when running as a PyInstaller one-file binary."""

    def test_settings_yaml_frozen(self, tmp_path):
        frozen_file = tmp_path / "concordance" / "settings.yaml"
        frozen_file.parent.mkdir(parents=True)
        frozen_file.write_text("tool_version: '0.0.1'")

        with patch("concordance.src.resources._frozen_base", return_value=str(tmp_path)):
            result = _get_settings_yaml_path_impl()
        assert result == str(frozen_file)

    def test_fixtures_dir_frozen(self, tmp_path):
        frozen_dir = tmp_path / "concordance" / "fixtures"
        frozen_dir.mkdir(parents=True)

        with patch("concordance.src.resources._frozen_base", return_value=str(tmp_path)):
            result = _get_fixtures_dir_impl()
        assert result == str(frozen_dir)

    def test_falls_back(self, tmp_path):
        """_MEIPASS without the bundled files falls back to dev paths."""
        with patch("concordance.src.resources._frozen_base", return_value=str(tmp_path)):
            assert _get_settings_yaml_path_impl() == os.path.normpath(os.path.join(SRC_DIR, "..", "settings.yaml"))
            assert _get_fixtures_dir_impl() == os.path.normpath(os.path.join(SRC_DIR, "..", "fixtures"))


# ── Fixtures ────────────────────────────────────────────────────────────────


@pytest.mark.unit
class TestFixtures:
    """Bundled demo problem files."""

    def test_list(self):
        assert list_fixtures() == [
            "crossing_change_trefoil",
            "genus_two_stabilizing_one",
            "nine_forty_six",
            "six_component_link",
            "triple_sum_satellite",
        ]

    def test_path(self):
        assert get_fixture_path("nine_forty_six").endswith(os.path.join("fixtures", "nine_forty_six.yaml"))

    def test_missing(self):
        with pytest.raises(FileNotFoundError, match="Available: crossing_change_trefoil"):
            get_fixture_path("figure_eight")

    def test_empty_dir(self, tmp_path):
        with patch("concordance.src.resources.get_fixtures_dir", return_value=str(tmp_path / "none")):
            assert list_fixtures() == []

    def test_every_fixture_parses(self, load_fixture):
        """Each bundled file is a valid problem file with requests."""
        for name in list_fixtures():
            assert load_fixture(name).requests, name


# ── lru_cache wrappers ──────────────────────────────────────────────────────


@pytest.mark.unit
class TestCachedGetters:
    """Public cached getters delegate to impl and cache the result."""

    def test_get_settings_yaml_path_caches(self):
        first = get_settings_yaml_path()
        second = get_settings_yaml_path()
        assert first == second
        assert get_settings_yaml_path.cache_info().hits == 1

    def test_cache_clear_recomputes(self, tmp_path):
        """After cache_clear, the getter calls the impl again."""
        dev_result = get_fixtures_dir()

        get_fixtures_dir.cache_clear()
        frozen_dir = tmp_path / "concordance" / "fixtures"
        frozen_dir.mkdir(parents=True)

        with patch("concordance.src.resources._frozen_base", return_value=str(tmp_path)):
            frozen_result = get_fixtures_dir()

        assert frozen_result == str(frozen_dir)
        assert frozen_result != dev_result
