"""Tests for runtime settings."""

import pytest

from concordance.src.settings import Settings, get_settings, load_settings


@pytest.mark.unit
class TestSettings:
    """Validation, overrides and format support."""

    def test_defaults(self):
        s = Settings()
        assert s.supported_formats == (1,)
        assert s.precision_start_bits <= s.precision_max_bits
        assert not s.assume_admissible

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"enumeration_bound": 0},
            {"worker_threads": -1},
            {"precision_start_bits": True},
            {"precision_start_bits": 128, "precision_max_bits": 64},
            {"max_search_genus": -1},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            Settings(**kwargs)

    def test_with_overrides(self):
        """None values are ignored and changed fields are recorded."""
        base = Settings()
        assert base.with_overrides(enumeration_bound=None) is base
        changed = base.with_overrides(enumeration_bound=50, worker_threads=1, precision_start_bits=None)
        assert changed.enumeration_bound == 50
        assert changed.worker_threads == 1
        assert changed.overrides == ("enumeration_bound", "worker_threads")
        assert changed != base

    def test_overrides_ignored_in_equality(self):
        assert Settings(overrides=("x",)) == Settings()

    @pytest.mark.parametrize(
        "fmt,expected",
        [(1, True), ("1", True), ("1.3", True), (2, False), ("one", False), (None, False)],
    )
    def test_supports_format(self, fmt, expected):
        assert Settings().supports_format(fmt) is expected


@pytest.mark.unit
class TestLoadSettings:
    """Reading settings.yaml."""

    def test_bundled(self):
        s = load_settings()
        assert s.tool_version == "1.0.0"
        assert s.enumeration_bound == 1000000
        assert s.max_search_genus == 12

    def test_custom_file(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("tool_version: '2.0.0'\nenumeration_bound: 81\nsupported_formats: [1, 2]\n")
        s = load_settings(str(path))
        assert s.tool_version == "2.0.0"
        assert s.enumeration_bound == 81
        assert s.supports_format(2)

    @pytest.mark.parametrize("content", ["- just\n- a list\n", "key: [unclosed\n"])
    def test_fallback_on_bad_content(self, tmp_path, content):
        path = tmp_path / "settings.yaml"
        path.write_text(content)
        assert load_settings(str(path)) == Settings()

    def test_fallback_on_missing_file(self, tmp_path):
        assert load_settings(str(tmp_path / "missing.yaml")) == Settings()

    def test_get_settings_cached(self):
        assert get_settings() is get_settings()
