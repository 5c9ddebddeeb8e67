"""In-memory cache of built nets, keyed by the digest of their family spec."""
from __future__ import annotations

import hashlib
import json
import logging
import time
from typing import Any, Optional

logger = logging.getLogger(__name__)


class NetCache:
    """TTL cache mapping a family spec (as JSON-able data) to the object built from it."""

    def __init__(self, ttl: int = 3600):
        """Initialize the cache.

        Args:
            ttl: Time to live in seconds
        """
        self.cache: dict[str, tuple[float, Any]] = {}
        self.ttl = ttl

    def _make_key(self, spec: dict) -> str:
        payload = json.dumps(spec, sort_keys=True, separators=(",", ":"))
        return hashlib.md5(payload.encode()).hexdigest()

    def get(self, spec: dict) -> Optional[Any]:
        """Return the cached object for ``spec`` or None if missing/expired."""
        key = self._make_key(spec)
        if key not in self.cache:
            return None

        timestamp, value = self.cache[key]
        if time.monotonic() - timestamp > self.ttl:
            # Expired
            del self.cache[key]
            return None

        logger.debug(f"Cache hit for spec {key[:8]}")
        return value

    def set(self, spec: dict, value: Any):
        """Cache ``value`` under ``spec``."""
        key = self._make_key(spec)
        self.cache[key] = (time.monotonic(), value)
        logger.debug(f"Cached net for spec {key[:8]}")

    def clear(self):
        """Drop every entry."""
        self.cache.clear()
        logger.info("Net cache cleared")

    def size(self) -> int:
        return len(self.cache)
