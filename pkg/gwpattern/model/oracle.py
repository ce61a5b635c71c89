"""
Brute-force ground truth for small inputs.

Everything here enumerates; nothing is memoised. Each entry point refuses
inputs beyond a hard size cap with :class:`OracleCapError`.
"""

from collections.abc import Callable, Iterator
from itertools import combinations
import math

import networkx as nx

from ..core.errors import OracleCapError, SpanError
from ..logging.bridge import get_structured_logger
from .offspring import OffspringDistribution
from .ordered_tree import OrderedTree

logger = get_structured_logger(__name__)

MAX_ENUMERATION_SIZE = 14
MAX_PATTERN_SIZE = 8
MAX_HOST_SIZE = 60
MAX_CONDITIONED_SIZE = 10
MAX_DISTANCE_HOST_SIZE = 200


def catalan(k: int) -> int:
    """``C_k = binom(2k, k) / (k + 1)``; trees of size ``n`` number ``C_{n-1}``."""
    return math.comb(2 * k, k) // (k + 1)


def _words(remaining: int, height: int) -> Iterator[tuple[int, ...]]:
    # height = open child slots; the word ends when it drops to 0
    if remaining == 1:
        yield (0,)
        return
    # every open slot still needs at least one of the remaining vertices
    for d in range(0, remaining - height + 1):
        new_height = height - 1 + d
        if new_height < 1:
            continue
        for rest in _words(remaining - 1, new_height):
            yield (d, *rest)


def enumerate_ordered_trees(n: int) -> list[OrderedTree]:
    """All ordered trees on ``n`` vertices, lexicographic in the degree sequence."""
    if not 1 <= n <= MAX_ENUMERATION_SIZE:
        raise OracleCapError(f"enumeration needs 1 <= n <= {MAX_ENUMERATION_SIZE}, got {n}")
    return [OrderedTree(word) for word in _words(n, 1)]


def _match(pattern: OrderedTree, u: int, host: OrderedTree, w: int) -> int:
    pattern_kids = pattern.children[u]
    host_kids = host.children[w]
    total = 0
    for chosen in combinations(host_kids, len(pattern_kids)):
        count = 1
        for pu, hw in zip(pattern_kids, chosen, strict=True):
            count *= _match(pattern, pu, host, hw)
            if not count:
                break
        total += count
    return total


def naive_rooted_copies(pattern: OrderedTree, host: OrderedTree, v: int = 0) -> int:
    """Rooted copies of ``pattern`` at host vertex ``v`` by trying every child injection."""
    if pattern.size > MAX_PATTERN_SIZE:
        raise OracleCapError(f"pattern size {pattern.size} exceeds {MAX_PATTERN_SIZE}")
    if host.size > MAX_HOST_SIZE:
        raise OracleCapError(f"host size {host.size} exceeds {MAX_HOST_SIZE}")
    if not 0 <= v < host.size:
        raise IndexError(f"vertex {v} outside a tree of size {host.size}")
    return _match(pattern, 0, host, v)


def tree_weight(tree: OrderedTree, dist: OffspringDistribution) -> float:
    """``prod_v p_{d(v)}``: probability that the GW tree equals ``tree``."""
    pmf = dist.pmf
    weight = 1.0
    for d in tree.degrees:
        if d > dist.max_degree:
            return 0.0
        weight *= float(pmf[d])
    return weight


def enumerated_size_prob(dist: OffspringDistribution, n: int) -> float:
    """``P(|T| = n)`` as the total weight of all size-``n`` trees."""
    return math.fsum(tree_weight(t, dist) for t in enumerate_ordered_trees(n))


def exact_conditioned_mean_by_enumeration(
    statistic: Callable[[OrderedTree], float],
    dist: OffspringDistribution,
    n: int,
) -> float:
    """
    ``E statistic(T_n)`` as a weighted average over every tree of size ``n``.

    Raises:
        OracleCapError: ``n`` above the cap.
        SpanError: every size-``n`` tree has weight 0.
    """
    if n > MAX_CONDITIONED_SIZE:
        raise OracleCapError(f"conditioned enumeration needs n <= {MAX_CONDITIONED_SIZE}")
    weighted: list[float] = []
    weights: list[float] = []
    for tree in enumerate_ordered_trees(n):
        w = tree_weight(tree, dist)
        if w:
            weights.append(w)
            weighted.append(w * float(statistic(tree)))
    total = math.fsum(weights)
    if total <= 0:
        raise SpanError(f"no tree of size {n} has positive weight")
    logger.debug("oracle conditioned mean", n=n, trees=len(weights), total_weight=total)
    return math.fsum(weighted) / total


def pairwise_distance_count(host: OrderedTree, length: int) -> int:
    """Unordered vertex pairs at graph distance exactly ``length``, by BFS from every vertex."""
    if length < 1:
        raise ValueError("distance must be at least 1")
    if host.size > MAX_DISTANCE_HOST_SIZE:
        raise OracleCapError(f"host size {host.size} exceeds {MAX_DISTANCE_HOST_SIZE}")
    graph = nx.Graph()
    graph.add_nodes_from(range(host.size))
    graph.add_edges_from((host.parent[v], v) for v in range(1, host.size))
    ordered = sum(
        1
        for _, lengths in nx.all_pairs_shortest_path_length(graph)
        for dist in lengths.values()
        if dist == length
    )
    return ordered // 2
