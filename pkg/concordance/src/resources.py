"""Resolve paths to package data (settings, bundled fixtures) for installed or frozen CLI.

Supports:
- PyInstaller: data under sys._MEIPASS (e.g. concordance/settings.yaml, concordance/fixtures/)
- Installed package / development: __file__-relative (package is on disk)
"""

import os
import sys
from functools import lru_cache
from typing import Optional


def _frozen_base() -> Optional[str]:
    """Return base path when running as PyInstaller one-file binary."""
    return getattr(sys, "_MEIPASS", None)


def _get_settings_yaml_path_impl() -> str:
    """Return path to concordance/settings.yaml."""
    meipass = _frozen_base()
    if meipass:
        path = os.path.join(meipass, "concordance", "settings.yaml")
        if os.path.isfile(path):
            return path
    # This file is in concordance/src, concordance/ is the parent
    return os.path.normpath(
        os.path.join(os.path.dirname(__file__), "..", "settings.yaml")
    )


def _get_fixtures_dir_impl() -> str:
    """Return path to concordance/fixtures directory."""
    meipass = _frozen_base()
    if meipass:
        path = os.path.join(meipass, "concordance", "fixtures")
        if os.path.isdir(path):
            return path
    return os.path.normpath(os.path.join(os.path.dirname(__file__), "..", "fixtures"))


@lru_cache(maxsize=1)
def get_settings_yaml_path() -> str:
    """Return path to settings.yaml (cached)."""
    return _get_settings_yaml_path_impl()


@lru_cache(maxsize=1)
def get_fixtures_dir() -> str:
    """Return path to the bundled fixtures directory (cached)."""
    return _get_fixtures_dir_impl()


def list_fixtures() -> list[str]:
    """Return the names of bundled fixture files, without extension, sorted."""
    fixtures_dir = get_fixtures_dir()
    if not os.path.isdir(fixtures_dir):
        return []
    return sorted(
        os.path.splitext(name)[0]
        for name in os.listdir(fixtures_dir)
        if name.endswith(".yaml")
    )


def get_fixture_path(name: str) -> str:
    """Return the path of a bundled fixture by name.

    Raises:
        FileNotFoundError: If no fixture with that name is bundled
    """
    path = os.path.join(get_fixtures_dir(), f"{name}.yaml")
    if not os.path.isfile(path):
        raise FileNotFoundError(
            f"No bundled fixture named '{name}'. Available: {', '.join(list_fixtures())}"
        )
    return path
