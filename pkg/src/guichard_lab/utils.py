"""Utility functions for Guichard Lab."""
import codecs
import io
import sys
from typing import Optional, Sequence, TextIO

from .core.errors import ConfigError


def setup_console_encoding(streams: Optional[Sequence[TextIO]] = None) -> None:
    """Escape instead of failing when echoed user text does not fit a non-UTF-8 console."""
    for stream in streams or (sys.stdout, sys.stderr):
        if isinstance(stream, io.TextIOWrapper) and codecs.lookup(stream.encoding).name != "utf-8":
            stream.reconfigure(errors="backslashreplace")


def parse_grid(text: str) -> tuple[int, int, int]:
    """``"9x9x9"`` (or a single ``"9"``) -> per-axis sample counts."""
    parts = text.lower().split("x")
    if len(parts) == 1:
        parts = parts * 3
    try:
        counts = tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"Invalid grid {text!r}, expected N1xN2xN3") from None
    if len(counts) != 3:
        raise ConfigError(f"Invalid grid {text!r}, expected N1xN2xN3")
    return counts


def parse_vector(text: str) -> tuple[float, float, float]:
    """``"1,-2,0.5"`` -> (1.0, -2.0, 0.5)."""
    try:
        values = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise ConfigError(f"Invalid vector {text!r}, expected three comma-separated numbers") from None
    if len(values) != 3:
        raise ConfigError(f"Invalid vector {text!r}, expected three comma-separated numbers")
    return values


def parse_tolerances(items: Sequence[str]) -> dict[str, float]:
    """``["first_order=1e-9", ...]`` -> {"first_order": 1e-9, ...}."""
    out: dict[str, float] = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"Invalid tolerance {item!r}, expected name=value")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"Invalid tolerance value in {item!r}") from None
    return out
