"""Logging utilities for the concordance toolkit with colored output support."""

import logging
import sys
from typing import Iterable, Optional

import colorlog
from tqdm import tqdm

BOLD = "\033[1m"
END = "\033[0m"

# Configure root logger; reports own stdout, so log lines go to stderr
root_logger = logging.getLogger()
root_logger.setLevel(logging.INFO)

if not root_logger.handlers:
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.DEBUG)
    console_handler.setFormatter(
        colorlog.ColoredFormatter(
            "%(log_color)s%(message)s",
            log_colors={
                "DEBUG": "cyan",
                "INFO": "reset",
                "WARNING": "yellow",
                "ERROR": "red",
                "CRITICAL": "bold_red",
            },
        )
    )
    root_logger.addHandler(console_handler)


class ConcordanceLogger:
    """Logger wrapper that provides formatted output with colors and indentation."""

    def __init__(self, logger: logging.Logger):
        self.logger = logger

    def section(self, title: str):
        """Log a section header."""
        self.logger.info(f"\n{BOLD}=== {title} ==={END}")

    def success(self, msg: str):
        """Log a success message."""
        self.logger.info(f"✓ {msg}")

    def warning(self, msg: str):
        """Log a warning message."""
        self.logger.warning(f"! {msg}")

    def error(self, msg: str):
        """Log an error message."""
        self.logger.error(f"✗ {msg}")

    def info(self, msg: str, indent: int = 0):
        """Log an info message with optional indentation."""
        prefix = "  " * indent
        self.logger.info(f"{prefix}{msg}")

    def detail(self, msg: str, data: Optional[dict] = None):
        """Log a debug message, with optional key/value context."""
        if not self.logger.isEnabledFor(logging.DEBUG):
            return
        if data:
            context = ", ".join(f"{k}={v}" for k, v in data.items())
            msg = f"{msg} ({context})"
        self.logger.debug(msg)


def set_verbosity(verbose: bool = False, quiet: bool = False) -> None:
    """Adjust the root log level from CLI flags."""
    if verbose:
        root_logger.setLevel(logging.DEBUG)
    elif quiet:
        root_logger.setLevel(logging.WARNING)
    else:
        root_logger.setLevel(logging.INFO)


def get_logger(name: str) -> ConcordanceLogger:
    """Get a configured ConcordanceLogger instance."""
    logger = logging.getLogger(name)
    return ConcordanceLogger(logger)


def progress(iterable: Iterable, desc: str, total: Optional[int] = None) -> Iterable:
    """Wrap an iterable in a tqdm bar when stderr is a terminal and logging is not quiet."""
    disable = not sys.stderr.isatty() or root_logger.getEffectiveLevel() > logging.INFO
    return tqdm(
        iterable,
        desc=desc,
        total=total,
        disable=disable,
        dynamic_ncols=True,
        smoothing=0.05,
        leave=False,
        file=sys.stderr,
    )
