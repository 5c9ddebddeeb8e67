"""Core utilities for Guichard Lab."""
from .cache import NetCache
from .config import Settings, get_settings, settings
from .monitoring import PerformanceMonitor, get_monitor

__all__ = [
    "Settings",
    "get_settings",
    "settings",
    "NetCache",
    "PerformanceMonitor",
    "get_monitor",
]
