"""
Replicate pool.

Replicate ``i`` of phase ``p`` always draws from ``RngState(seed, i, p)``.
Chunks run on a thread pool, and results are collected by replicate index,
so every reduction sees the same order at any worker count.
"""

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import numpy as np

from ..core.settings import get_settings
from ..logging.bridge import get_structured_logger
from ..model.sampler import RngState
from ..render.progress import ReplicateProgress

T = TypeVar("T")

logger = get_structured_logger(__name__)


def run_replicates(
    task: Callable[[np.random.Generator], T],
    replicates: int,
    seed: int,
    phase: int = 0,
    *,
    threads: int | None = None,
    description: str = "replicates",
    show_progress: bool | None = None,
) -> list[T]:
    """
    Run ``task`` once per replicate on its own derived generator.

    Args:
        task: Called with the replicate's generator; must not share mutable state.
        replicates: Number of replicates.
        seed: Master seed.
        phase: Extra spawn-key component separating experiments on one seed.
        threads: Worker count; defaults to ``runner.threads`` (``GWPATTERN_THREADS``).
        description: Progress bar label.
        show_progress: Force the bar on or off; by default it shows on a terminal.

    Returns:
        Task results ordered by replicate index.
    """
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    runner = get_settings().runner
    workers = runner.threads if threads is None else threads
    size = runner.chunk_size
    chunks = [range(s, min(s + size, replicates)) for s in range(0, replicates, size)]

    def work(chunk: range) -> list[T]:
        return [task(RngState(seed, i, phase).generator()) for i in chunk]

    results: list[T] = []
    logger.debug("replicates", count=replicates, phase=phase, workers=workers)
    with ReplicateProgress(description, replicates, enabled=show_progress) as progress:
        if workers <= 1 or len(chunks) == 1:
            for chunk in chunks:
                results.extend(work(chunk))
                progress.advance(len(chunk))
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                for out in pool.map(work, chunks):
                    results.extend(out)
                    progress.advance(len(out))
    return results
