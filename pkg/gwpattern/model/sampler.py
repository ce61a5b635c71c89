"""
Exact samplers for Galton-Watson trees.

The size-conditioned sampler draws ``n`` i.i.d. offspring counts, rejects
unless they sum to ``n - 1``, and rotates the accepted sequence with the
cycle lemma: exactly one cyclic shift of a step sequence summing to ``-1``
is a Lukasiewicz word, namely the one starting right after the first
minimum of the partial sums.
"""

from dataclasses import dataclass
import math

import numpy as np

from ..core.errors import BudgetError, CapExceeded, SizeError, SpanError
from ..core.settings import get_settings
from ..logging.bridge import get_structured_logger
from .offspring import OffspringDistribution, span
from .ordered_tree import OrderedTree
from .random_walk import point_prob

logger = get_structured_logger(__name__)

# cap on offspring draws held in memory per rejection batch
_BATCH_DRAWS = 1 << 22


@dataclass(frozen=True)
class RngState:
    """
    Seed plus stream index.

    The generator for ``(seed, phase, stream)`` is derived through
    ``numpy.random.SeedSequence`` spawn keys, so replicate ``i`` sees the
    same draws whichever worker runs it and in whatever order. Experiments
    use the tree size as ``phase``.
    """

    seed: int
    stream: int = 0
    phase: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(self.phase, self.stream))
        )

    def derive(self, index: int) -> "RngState":
        """Stream for replicate ``index`` under this master seed and phase."""
        return RngState(self.seed, index, self.phase)


def sample_unconditioned(
    dist: OffspringDistribution,
    rng: np.random.Generator,
    size_cap: int | None = None,
) -> OrderedTree | CapExceeded:
    """
    Grow one GW tree in preorder.

    Returns ``CapExceeded`` as soon as more than ``size_cap`` vertices
    would be needed; a clipped tree is never returned.
    """
    cap = get_settings().sampler.size_cap if size_cap is None else size_cap
    if cap < 1:
        raise ValueError("size_cap must be at least 1")

    degrees: list[int] = []
    height = 0
    block = 64
    while True:
        draws = dist.sample(rng, block)
        walk = height + np.cumsum(draws - 1)
        done = np.flatnonzero(walk < 0)
        take = int(done[0]) + 1 if len(done) else len(draws)
        if len(degrees) + take > cap:
            return CapExceeded(size_cap=cap, reached=len(degrees) + take)
        degrees.extend(int(x) for x in draws[:take])
        if len(done):
            return OrderedTree(tuple(degrees))
        height = int(walk[-1])
        block = min(block * 2, cap)


def cycle_lemma_rotation(degrees: np.ndarray) -> int:
    """
    Start index of the unique rotation that is a Lukasiewicz word.

    ``degrees`` must sum to ``len(degrees) - 1``. The rotation starts one
    past the first position where the partial sums of ``d_i - 1`` reach
    their minimum.
    """
    partial = np.cumsum(degrees - 1)
    if partial[-1] != -1:
        raise ValueError("cycle lemma needs steps summing to -1")
    return (int(np.argmin(partial)) + 1) % len(degrees)


def sample_conditioned(
    dist: OffspringDistribution,
    n: int,
    rng: np.random.Generator,
    budget: int | None = None,
) -> OrderedTree:
    """
    Draw ``T_n`` exactly.

    Raises:
        SpanError: trees of size ``n`` have probability 0.
        BudgetError: more than ``budget`` rejection rounds were needed.
    """
    if n < 1:
        raise SizeError(f"tree size must be at least 1, got {n}")
    h = span(dist)
    if (n - 1) % h:
        raise SpanError(f"span {h} does not divide n - 1 = {n - 1}")
    if n == 1:
        return OrderedTree((0,))

    limit = get_settings().sampler.rejection_budget if budget is None else budget
    accept = point_prob(dist, n, n - 1)
    if accept <= 0:
        raise SpanError(f"P(S_{n} = {n - 1}) vanishes; size {n} is unreachable")
    rows = max(1, min(math.ceil(0.5 / accept), _BATCH_DRAWS // n))

    rounds = 0
    while rounds < limit:
        batch = min(rows, limit - rounds)
        draws = dist.sample(rng, batch * n).reshape(batch, n)
        hits = np.flatnonzero(draws.sum(axis=1) == n - 1)
        if len(hits):
            rounds += int(hits[0]) + 1
            row = draws[hits[0]]
            start = cycle_lemma_rotation(row)
            logger.debug("conditioned sample accepted", n=n, rounds=rounds)
            return OrderedTree(tuple(int(x) for x in np.roll(row, -start)))
        rounds += batch

    raise BudgetError(f"no tree of size {n} after {limit} rejection rounds")
