"""Concurrent verification of the equation instances."""
from __future__ import annotations

import asyncio
import logging
from typing import Optional

from ..core.config import settings
from ..core.monitoring import get_monitor
from .prolongation import VectorFieldAnsatz, builtin_generator, prolong_first
from .verify import InstanceResult, SymmetryReport, equation_instances, summarize, verify_instance

logger = logging.getLogger(__name__)


class BatchVerifier:
    """Runs the per-instance reductions in worker threads, at most ``max_concurrency`` at a time."""

    def __init__(self, max_concurrency: Optional[int] = None):
        """Initialize the verifier.

        Args:
            max_concurrency: Maximum concurrent reductions (default ``settings.VERIFY_CONCURRENCY``)
        """
        self.max_concurrency = max_concurrency or settings.VERIFY_CONCURRENCY

    async def verify(self, v: VectorFieldAnsatz) -> SymmetryReport:
        """Verify ``v``; results keep the order of ``equation_instances()``."""
        pr = prolong_first(v)
        semaphore = asyncio.Semaphore(self.max_concurrency)

        async def verify_one(family, indices, expr) -> InstanceResult:
            async with semaphore:
                return await asyncio.to_thread(verify_instance, pr, family, indices, expr)

        with get_monitor().measure("symmetry.verify_async"):
            tasks = [verify_one(*item) for item in equation_instances()]
            results = await asyncio.gather(*tasks)

        logger.debug(f"Batch verification complete: {sum(r.zero for r in results)}/{len(results)} instances vanish")
        return summarize(v, list(results))


async def verify_generator_async(v: Optional[VectorFieldAnsatz] = None, max_concurrency: Optional[int] = None) -> SymmetryReport:
    """Async counterpart of ``verify_generator``."""
    return await BatchVerifier(max_concurrency).verify(builtin_generator() if v is None else v)
