"""Runtime settings loaded from settings.yaml with hard-coded fallbacks."""

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

import yaml
from packaging import version

from .resources import get_settings_yaml_path

# Fallbacks if settings.yaml cannot be read
_FALLBACK_TOOL_VERSION = "1.0.0"
_FALLBACK_ENUMERATION_BOUND = 10**6
_FALLBACK_PRECISION_START = 64
_FALLBACK_PRECISION_MAX = 65536
_FALLBACK_MAX_SEARCH_GENUS = 12
_FALLBACK_WORKERS = 4


@dataclass(frozen=True)
class Settings:
    """Tunable limits shared by the computation modules."""

    tool_version: str = _FALLBACK_TOOL_VERSION
    supported_formats: tuple[int, ...] = (1,)
    enumeration_bound: int = _FALLBACK_ENUMERATION_BOUND
    precision_start_bits: int = _FALLBACK_PRECISION_START
    precision_max_bits: int = _FALLBACK_PRECISION_MAX
    max_search_genus: int = _FALLBACK_MAX_SEARCH_GENUS
    worker_threads: int = _FALLBACK_WORKERS
    assume_admissible: bool = False
    overrides: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        self._validate_positive("enumeration_bound", self.enumeration_bound)
        self._validate_positive("precision_start_bits", self.precision_start_bits)
        self._validate_positive("worker_threads", self.worker_threads)
        if self.precision_max_bits < self.precision_start_bits:
            raise ValueError(
                f"precision_max_bits ({self.precision_max_bits}) must be at least "
                f"precision_start_bits ({self.precision_start_bits})"
            )
        if self.max_search_genus < 0:
            raise ValueError("max_search_genus must be non-negative")

    @staticmethod
    def _validate_positive(name: str, value: int) -> None:
        """Reject non-positive integer settings."""
        if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
            raise ValueError(f"Setting '{name}' must be a positive integer (got {value!r})")

    def with_overrides(self, **kwargs) -> "Settings":
        """Return a copy with the given non-None fields replaced."""
        changes = {k: v for k, v in kwargs.items() if v is not None}
        if not changes:
            return self
        return replace(self, overrides=self.overrides + tuple(sorted(changes)), **changes)

    def supports_format(self, fmt: object) -> bool:
        """Check whether a problem file format version is understood.

        Args:
            fmt: The ``format`` value from a problem file (int or string)

        Returns:
            True if the major version matches a supported format
        """
        try:
            parsed = version.Version(str(fmt))
        except version.InvalidVersion:
            return False
        return parsed.major in self.supported_formats


def load_settings(path: Optional[str] = None) -> Settings:
    """Load settings from YAML.

    Args:
        path: Optional path to a settings file (defaults to the bundled one)

    Returns:
        Settings populated from the file, or the fallback constants if the
        file cannot be read
    """
    try:
        with open(path or get_settings_yaml_path(), "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except (FileNotFoundError, yaml.YAMLError):
        return Settings()

    if not isinstance(data, dict):
        return Settings()

    return Settings(
        tool_version=str(data.get("tool_version", _FALLBACK_TOOL_VERSION)),
        supported_formats=tuple(int(v) for v in data.get("supported_formats", [1])),
        enumeration_bound=int(data.get("enumeration_bound", _FALLBACK_ENUMERATION_BOUND)),
        precision_start_bits=int(data.get("precision_start_bits", _FALLBACK_PRECISION_START)),
        precision_max_bits=int(data.get("precision_max_bits", _FALLBACK_PRECISION_MAX)),
        max_search_genus=int(data.get("max_search_genus", _FALLBACK_MAX_SEARCH_GENUS)),
        worker_threads=int(data.get("worker_threads", _FALLBACK_WORKERS)),
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the bundled settings (cached)."""
    return load_settings()
