"""Process-pool helpers: contiguous work blocks and ordered results."""

import logging
import multiprocessing as mp
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..models.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


def resolve_workers(workers: Optional[int]) -> int:
    """0 or None means one worker per CPU."""
    if workers is None or workers == 0:
        return max(1, os.cpu_count() or 1)
    if workers < 0:
        raise InvalidArgumentError(f"workers must be >= 0, got {workers}")
    return int(workers)


def contiguous_blocks(n_items: int, n_blocks: int) -> List[Tuple[int, int]]:
    """Split range(n_items) into at most n_blocks contiguous [start, stop) ranges."""
    n_blocks = max(1, min(n_blocks, n_items)) if n_items else 1
    edges = np.linspace(0, n_items, n_blocks + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def _context():
    methods = mp.get_all_start_methods()
    return mp.get_context("fork" if "fork" in methods else "spawn")


def map_blocks(
    task: Callable[[Tuple[int, int]], Any],
    blocks: Sequence[Tuple[int, int]],
    workers: int,
    initializer: Optional[Callable[..., None]] = None,
    initargs: Tuple = (),
) -> List[Any]:
    """
    Run task over blocks and return results in block order.

    With a single worker everything runs in-process, so results are the
    same objects a pool would have produced.
    """
    if workers <= 1 or len(blocks) <= 1:
        if initializer is not None:
            initializer(*initargs)
        return [task(block) for block in blocks]
    logger.debug("dispatching %d blocks to %d workers", len(blocks), workers)
    with ProcessPoolExecutor(
        max_workers=workers,
        initializer=initializer,
        initargs=initargs,
        mp_context=_context(),
    ) as pool:
        return list(pool.map(task, blocks))
