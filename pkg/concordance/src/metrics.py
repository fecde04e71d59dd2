"""Wall-time and memory metrics for a CLI run."""

import time
from typing import Optional

import psutil

from .logger import ConcordanceLogger, get_logger

logger: ConcordanceLogger = get_logger(__name__)


class RunMetrics:
    """Tracks per-phase timings and peak memory of one command."""

    def __init__(self):
        self.start_time = time.time()
        self.phase_timings: dict[str, float] = {}
        self.current_phase: Optional[str] = None
        self.phase_start: Optional[float] = None
        self.peak_memory = 0.0  # MB
        self.process = psutil.Process()

    def start_phase(self, name: str):
        """Start timing a phase; an unfinished phase is closed first."""
        if self.current_phase is not None:
            self.end_phase(self.current_phase)
        self.current_phase = name
        self.phase_start = time.time()
        self.update_resource_usage()

    def end_phase(self, name: str):
        """End timing a phase."""
        if self.phase_start is not None and name == self.current_phase:
            self.phase_timings[name] = time.time() - self.phase_start
            self.current_phase = None
            self.phase_start = None
        self.update_resource_usage()

    def update_resource_usage(self):
        """Update peak resident memory."""
        memory = self.process.memory_info().rss / (1024 * 1024)
        self.peak_memory = max(self.peak_memory, memory)

    def get_total_duration(self) -> float:
        """Seconds since the metrics object was created."""
        return time.time() - self.start_time

    def log_summary(self):
        """Log a summary of collected metrics."""
        logger.section("Run Metrics")
        logger.info(f"Total Duration: {self.get_total_duration():.2f}s", indent=1)
        if self.phase_timings:
            logger.info("Phase Durations:", indent=1)
            for phase, duration in self.phase_timings.items():
                logger.info(f"{phase}: {duration:.2f}s", indent=2)
        logger.info(f"Peak Memory: {self.peak_memory:.1f}MB", indent=1)
