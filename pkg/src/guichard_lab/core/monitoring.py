"""Timing of builds, residual sweeps and symbolic verification."""
from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from typing import Dict, Iterator, Optional

logger = logging.getLogger(__name__)


class PerformanceMonitor:
    """Collects wall-clock durations per named operation."""

    def __init__(self):
        self.metrics: Dict[str, list[float]] = {}

    @contextmanager
    def measure(self, operation: str) -> Iterator[None]:
        """Time the enclosed block under ``operation``.

        Args:
            operation: Operation name, e.g. ``"build.translation"``
        """
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.metrics.setdefault(operation, []).append(elapsed)
            logger.debug(f"{operation} took {elapsed:.4f}s")

    def get_stats(self, operation: str) -> Optional[Dict[str, float]]:
        """Get statistics for an operation.

        Args:
            operation: Operation name

        Returns:
            Dictionary with count/total/avg/min/max or None if never measured
        """
        times = self.metrics.get(operation)
        if not times:
            return None
        return {
            "count": len(times),
            "total": sum(times),
            "avg": sum(times) / len(times),
            "min": min(times),
            "max": max(times),
        }

    def get_all_stats(self) -> Dict[str, Dict[str, float]]:
        """Statistics for every measured operation, sorted by name."""
        return {op: self.get_stats(op) for op in sorted(self.metrics)}

    def reset(self):
        """Reset all metrics."""
        self.metrics.clear()


# Global instance
_monitor = PerformanceMonitor()


def get_monitor() -> PerformanceMonitor:
    """Get the global performance monitor instance."""
    return _monitor
