"""
Rooted ordered trees stored as preorder degree sequences.

The degree sequence (Lukasiewicz word) ``d_0..d_{n-1}`` lists each vertex's
outdegree in depth-first preorder. Vertex ``v``'s fringe subtree is the
contiguous slice ``degrees[v:subtree_end[v]]``. The same type is used for
host trees and for patterns.

Text format: one ``(`` ... ``)`` pair per vertex with its children inside,
e.g. ``"(()())"`` is the cherry.
"""

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import accumulate

from ..core.errors import NotATreeError, ParseError


@dataclass(frozen=True)
class OrderedTree:
    """Immutable rooted ordered tree (vertex 0 is the root)."""

    degrees: tuple[int, ...]

    def __post_init__(self) -> None:
        _check_lukasiewicz(self.degrees)

    @classmethod
    def from_lukasiewicz(cls, degrees: "tuple[int, ...] | list[int]") -> "OrderedTree":
        """Validate and wrap a preorder degree sequence."""
        return cls(tuple(int(d) for d in degrees))

    @classmethod
    def parse(cls, text: str) -> "OrderedTree":
        """Parse the parenthesis format (alias of :func:`parse_parens`)."""
        return parse_parens(text)

    @property
    def size(self) -> int:
        """Number of vertices ``|T|``."""
        return len(self.degrees)

    def __len__(self) -> int:
        return len(self.degrees)

    def __str__(self) -> str:
        return to_parens(self)

    @property
    def max_degree(self) -> int:
        """``Delta(T)``, the maximal outdegree."""
        return max(self.degrees)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        """Children of every vertex, left to right."""
        kids: list[list[int]] = [[] for _ in self.degrees]
        stack: list[int] = []
        for v, d in enumerate(self.degrees):
            if stack:
                parent = stack[-1]
                kids[parent].append(v)
                if len(kids[parent]) == self.degrees[parent]:
                    stack.pop()
            if d > 0:
                stack.append(v)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def parent(self) -> tuple[int, ...]:
        """Parent index of every vertex; the root maps to -1."""
        parents = [-1] * self.size
        for v, kids in enumerate(self.children):
            for w in kids:
                parents[w] = v
        return tuple(parents)

    @cached_property
    def depths(self) -> tuple[int, ...]:
        """Distance from the root, per vertex."""
        depth = [0] * self.size
        for v, kids in enumerate(self.children):
            for w in kids:
                depth[w] = depth[v] + 1
        return tuple(depth)

    @cached_property
    def subtree_end(self) -> tuple[int, ...]:
        """One past the last preorder index of each fringe subtree."""
        sizes = [1] * self.size
        for v in range(self.size - 1, -1, -1):
            for w in self.children[v]:
                sizes[v] += sizes[w]
        return tuple(v + s for v, s in enumerate(sizes))

    @property
    def height(self) -> int:
        """Maximal depth."""
        return max(self.depths)


def _check_lukasiewicz(degrees: tuple[int, ...]) -> None:
    if not degrees:
        raise NotATreeError("a tree has at least one vertex")
    if any(d < 0 for d in degrees):
        raise NotATreeError("degrees must be nonnegative")
    walk = list(accumulate(d - 1 for d in degrees))
    if walk[-1] != -1:
        raise NotATreeError(f"degree sum is {sum(degrees)}, expected {len(degrees) - 1}")
    if any(s <= -1 for s in walk[:-1]):
        raise NotATreeError("a proper prefix closes the tree early")


def from_lukasiewicz(degrees: "tuple[int, ...] | list[int]") -> OrderedTree:
    """Build a tree from its preorder degree sequence."""
    return OrderedTree.from_lukasiewicz(degrees)


def parse_parens(text: str) -> OrderedTree:
    """
    Parse ``"(" children ")"`` nesting into a tree.

    Raises:
        ParseError: unbalanced text, stray characters, or text after the root closes.
    """
    body = "".join(text.split())
    if not body:
        raise ParseError("empty tree text")

    degrees: list[int] = []
    stack: list[int] = []
    closed_root = False
    for pos, ch in enumerate(body):
        if closed_root:
            raise ParseError(f"text continues after the root closes (position {pos})")
        if ch == "(":
            if stack:
                degrees[stack[-1]] += 1
            stack.append(len(degrees))
            degrees.append(0)
        elif ch == ")":
            if not stack:
                raise ParseError(f"unbalanced ')' at position {pos}")
            stack.pop()
            closed_root = not stack
        else:
            raise ParseError(f"unexpected character {ch!r} at position {pos}")
    if stack:
        raise ParseError("unbalanced '(': missing closing parentheses")

    return OrderedTree(tuple(degrees))


def to_parens(tree: OrderedTree) -> str:
    """Serialize a tree to the parenthesis format."""
    out: list[str] = []
    remaining: list[int] = []
    for d in tree.degrees:
        out.append("(")
        remaining.append(d)
        while remaining and remaining[-1] == 0:
            remaining.pop()
            out.append(")")
            if remaining:
                remaining[-1] -= 1
    return "".join(out)


def depth_profile(tree: OrderedTree) -> tuple[int, ...]:
    """``nu_i(T)``: number of vertices at depth ``i``, for ``i = 0..height``."""
    counts = [0] * (tree.height + 1)
    for depth in tree.depths:
        counts[depth] += 1
    return tuple(counts)


def degree_histogram(tree: OrderedTree) -> tuple[int, ...]:
    """``X_r(T)``: number of vertices of outdegree ``r``, for ``r = 0..Delta(T)``."""
    counter = Counter(tree.degrees)
    return tuple(counter.get(r, 0) for r in range(tree.max_degree + 1))


def fringe(tree: OrderedTree, v: int) -> OrderedTree:
    """Fringe subtree ``T^v``: ``v`` and all its descendants."""
    if not 0 <= v < tree.size:
        raise IndexError(f"vertex {v} out of range for a tree of size {tree.size}")
    return OrderedTree(tree.degrees[v : tree.subtree_end[v]])


def make_path(k: int) -> OrderedTree:
    """Path ``P_k`` with ``k`` vertices (length ``k - 1``)."""
    if k < 1:
        raise ValueError("a path needs at least one vertex")
    return OrderedTree((1,) * (k - 1) + (0,))


def make_star(delta: int) -> OrderedTree:
    """Root with ``delta`` leaf children."""
    if delta < 0:
        raise ValueError("star degree must be nonnegative")
    return OrderedTree((delta,) + (0,) * delta)


def make_two_path(q: int, r: int) -> OrderedTree:
    """``t_{q,r}``: branches of ``q`` and ``r`` edges joined at the root, ``q`` first."""
    if q < 1 or r < 1:
        raise ValueError("both branches need at least one edge")
    return OrderedTree((2,) + (1,) * (q - 1) + (0,) + (1,) * (r - 1) + (0,))


CHERRY = make_star(2)
SINGLE = make_path(1)
