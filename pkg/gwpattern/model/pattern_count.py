"""
Copies of a fixed ordered pattern inside a host tree.

A rooted copy of ``t`` at host vertex ``v`` maps the pattern root to ``v``
and each pattern vertex's children, in order, to an increasing selection of
the image's children. Counts are exact Python integers.
"""

from math import comb

from .ordered_tree import (
    OrderedTree,
    degree_histogram,
    depth_profile,
    make_two_path,
)

type CopyCount = int


def _pattern_classes(pattern: OrderedTree) -> tuple[list[tuple[int, ...]], int]:
    """
    Number the distinct fringe subtrees of ``pattern``.

    Returns, in creation order (children before parents), the child class
    ids of each class, and the class id of the whole pattern.
    """
    ids: dict[tuple[int, ...], int] = {}
    child_classes: list[tuple[int, ...]] = []
    vertex_class = [0] * pattern.size
    for v in range(pattern.size - 1, -1, -1):
        key = pattern.degrees[v : pattern.subtree_end[v]]
        if key not in ids:
            ids[key] = len(child_classes)
            child_classes.append(tuple(vertex_class[w] for w in pattern.children[v]))
        vertex_class[v] = ids[key]
    return child_classes, vertex_class[0]


def rooted_copies_all(pattern: OrderedTree, host: OrderedTree) -> tuple[CopyCount, ...]:
    """
    ``nu_t(T^v)`` for every host vertex ``v`` in preorder.

    One bottom-up pass per distinct pattern subtree. For a pattern vertex
    with child patterns ``t_1..t_d`` and a host vertex with children
    ``w_1..w_m``::

        f(i, j) = f(i, j-1) + nu_{t_i}(w_j) * f(i-1, j-1),  f(0, .) = 1

    and the rooted count is ``f(d, m)``.
    """
    child_classes, root_class = _pattern_classes(pattern)
    host_children = host.children
    n = host.size
    tables: list[list[int]] = []

    for kids_of_class in child_classes:
        d = len(kids_of_class)
        if d == 0:
            tables.append([1] * n)
            continue
        sub = [tables[c] for c in kids_of_class]
        table = [0] * n
        for v in range(n):
            kids = host_children[v]
            m = len(kids)
            if m < d:
                continue
            f = [1] + [0] * d
            for j, w in enumerate(kids):
                # pattern child i can only use host children j with i-1 <= j and d-i <= m-1-j
                hi = min(j + 1, d)
                lo = max(1, d - (m - 1 - j))
                for i in range(hi, lo - 1, -1):
                    if f[i - 1]:
                        f[i] += sub[i - 1][w] * f[i - 1]
            table[v] = f[d]
        tables.append(table)

    return tuple(tables[root_class])


def rooted_copies(pattern: OrderedTree, host: OrderedTree) -> CopyCount:
    """``nu_t(T)``: rooted copies at the host root."""
    return rooted_copies_all(pattern, host)[0]


def total_copies(pattern: OrderedTree, host: OrderedTree) -> CopyCount:
    """``N_t(T) = sum_v nu_t(T^v)``."""
    return sum(rooted_copies_all(pattern, host))


def path_copies(host: OrderedTree, k: int) -> CopyCount:
    """``N_{P_k}(T) = |T| - sum_{i <= k-2} nu_i(T)`` (every vertex of depth >= k-1 ends one copy)."""
    if k < 1:
        raise ValueError("a path needs at least one vertex")
    profile = depth_profile(host)
    return host.size - sum(profile[: k - 1])


def star_copies(host: OrderedTree, delta: int) -> CopyCount:
    """Copies of the ``delta``-star: ``sum_v C(d(v), delta)``."""
    if delta < 0:
        raise ValueError("star degree must be nonnegative")
    return sum(comb(r, delta) * x for r, x in enumerate(degree_histogram(host)))


def undirected_path_pairs(host: OrderedTree, length: int) -> CopyCount:
    """
    Unordered vertex pairs at tree distance exactly ``length``.

    Ancestor pairs are copies of the path on ``length + 1`` vertices; the
    rest are leaf pairs of ``t_{q, length-q}`` for ``q = 1..length-1``.
    """
    if length < 1:
        raise ValueError("path length must be at least 1")
    total = path_copies(host, length + 1)
    for q in range(1, length):
        total += total_copies(make_two_path(q, length - q), host)
    return total
