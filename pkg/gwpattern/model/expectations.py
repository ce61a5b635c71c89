"""
Exact and limiting expectations of rooted pattern copies.

For a pattern with preorder degrees ``d_1..d_k``:

* unconditioned GW tree: ``E nu_t(T) = prod_i E C(xi, d_i)``;
* size-conditioned tree, ``n > k``::

      E nu_t(T_n) = n/(n-k) * sum_m A(m) (m-k+1) P(S_{n-k} = n-m-1) / P(S_n = n-1)

  with ``A`` the convolution of the weights ``p_m C(m, d_i)``;
* its limit ``sum_i (d_i+1) E C(xi, d_i+1) prod_{j != i} E C(xi, d_j)``,
  which may be infinite;
* tree size law ``P(|T| = n) = P(S_n = n-1) / n``.
"""

from collections import Counter
from dataclasses import dataclass
import math

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..core.errors import SizeError, SpanError
from ..logging.bridge import get_structured_logger
from .offspring import Moment, OffspringDistribution, factorial_binomial_moment, span
from .ordered_tree import OrderedTree
from .random_walk import point_prob, walk_sum_pmf

logger = get_structured_logger(__name__)


class ExpectationResult(BaseModel):
    """A computed expectation with its truncation bound and the code paths used."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    value: float
    error_bound: float = 0.0
    provenance: tuple[str, ...] = ()

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)


@dataclass(frozen=True, eq=False)
class WeightedDegreeMeasure:
    """Weights ``p_m C(m, d)`` over the dense support, for one pattern degree ``d``."""

    d: int
    weights: np.ndarray
    tail: Moment

    @classmethod
    def build(cls, dist: OffspringDistribution, d: int) -> "WeightedDegreeMeasure":
        m = np.arange(dist.max_degree + 1)
        binom = np.array([math.comb(int(x), d) for x in m], dtype=np.float64)
        weights = dist.pmf * binom
        weights.setflags(write=False)
        return cls(d, weights, dist.tail_factorial_moment(d))

    def total(self) -> float:
        """Equals ``factorial_binomial_moment(dist, d)`` up to the tail."""
        return math.fsum(self.weights.tolist())


def _product_with_bound(moments: list[Moment]) -> Moment:
    if any(math.isinf(m.value) for m in moments):
        return Moment(math.inf, math.inf)
    value = math.prod(m.value for m in moments)
    upper = math.prod(m.value + m.error_bound for m in moments)
    return Moment(value, upper - value)


def limit_root_mean(pattern: OrderedTree, dist: OffspringDistribution) -> ExpectationResult:
    """``E nu_t(T) = prod_i E C(xi, d_i)``, the per-vertex limit of ``N_t(T_n)/n``."""
    counts = Counter(pattern.degrees)
    moments: list[Moment] = []
    for d, times in counts.items():
        moments.extend([factorial_binomial_moment(dist, d)] * times)
    result = _product_with_bound(moments)
    return ExpectationResult(
        value=result.value, error_bound=result.error_bound, provenance=("product_formula",)
    )


def limit_root_mean_conditioned(
    pattern: OrderedTree, dist: OffspringDistribution
) -> ExpectationResult:
    """
    ``lim E nu_t(T_n) = sum_i (d_i+1) E C(xi, d_i+1) prod_{j != i} E C(xi, d_j)``.

    Returns ``inf`` when ``E C(xi, Delta_t + 1)`` diverges.
    """
    degrees = pattern.degrees
    base = [factorial_binomial_moment(dist, d) for d in degrees]
    value = 0.0
    bound = 0.0
    for i, d in enumerate(degrees):
        raised = factorial_binomial_moment(dist, d + 1)
        term = _product_with_bound(
            [Moment((d + 1) * raised.value, (d + 1) * raised.error_bound)]
            + base[:i]
            + base[i + 1 :]
        )
        if math.isinf(term.value):
            return ExpectationResult(
                value=math.inf, error_bound=0.0, provenance=("conditioned_limit", "divergent")
            )
        value += term.value
        bound += term.error_bound
    return ExpectationResult(value=value, error_bound=bound, provenance=("conditioned_limit",))


def _check_size(dist: OffspringDistribution, n: int) -> float:
    h = span(dist)
    if (n - 1) % h:
        raise SpanError(f"no tree of size {n}: span {h} does not divide {n - 1}")
    denominator = point_prob(dist, n, n - 1)
    if denominator <= 0:
        raise SpanError(f"P(S_{n} = {n - 1}) vanishes; size {n} is unreachable")
    return denominator


def exact_root_mean_conditioned(
    pattern: OrderedTree, dist: OffspringDistribution, n: int
) -> ExpectationResult:
    """
    Exact ``E nu_t(T_n)`` by convolving the per-vertex weights.

    Raises:
        SizeError: ``n <= |t|``.
        SpanError: no tree of size ``n`` has positive probability.
    """
    k = pattern.size
    if n <= k:
        raise SizeError(f"need n > |t| = {k}, got n = {n}")
    denominator = _check_size(dist, n)

    measures = {d: WeightedDegreeMeasure.build(dist, d) for d in set(pattern.degrees)}
    convolved = np.ones(1)
    for d in pattern.degrees:
        convolved = np.convolve(convolved, measures[d].weights)[:n]

    walk = walk_sum_pmf(dist, n - k, cap=n - 1)
    head = np.zeros(n)
    stored = walk.mass[: n - walk.offset] if walk.offset < n else walk.mass[:0]
    head[walk.offset : walk.offset + len(stored)] = stored
    # reach[m] = P(S_{n-k} = n-m-1) for m = 0..n-1
    reach = head[::-1]
    m = np.arange(len(convolved))
    excess = m - k + 1
    terms = convolved * np.where(excess > 0, excess, 0) * reach[: len(convolved)]
    numerator = math.fsum(terms.tolist())
    value = n / (n - k) * numerator / denominator

    bound = _truncation_bound(pattern, dist, n, measures, reach, denominator)
    provenance = ("exact_conditioned", walk.provenance)
    logger.debug("exact conditioned mean", n=n, k=k, value=value, bound=bound)
    return ExpectationResult(value=value, error_bound=bound, provenance=provenance)


def _truncation_bound(
    pattern: OrderedTree,
    dist: OffspringDistribution,
    n: int,
    measures: dict[int, WeightedDegreeMeasure],
    reach: np.ndarray,
    denominator: float,
) -> float:
    """Bound on what the dense cut at ``M`` removes; 0 when ``M >= n - 1``."""
    if dist.tail_mass == 0.0 or dist.max_degree >= n - 1:
        return 0.0
    k = pattern.size
    totals = [measures[d].total() for d in pattern.degrees]
    tails = [measures[d].tail.value + measures[d].tail.error_bound for d in pattern.degrees]
    if any(math.isinf(t) for t in tails):
        return math.inf
    # configurations with some m_i > M
    missing = sum(
        tails[i] * math.prod(totals[:i] + totals[i + 1 :]) for i in range(len(totals))
    )
    scale = n / (n - k) * (n - k) / denominator
    cut_configs = missing * scale * float(reach.max(initial=0.0))
    # the truncated walk under-counts each point probability by at most (n-k) * tail_mass
    walk_error = math.prod(totals) * scale * (n - k) * dist.tail_mass
    return cut_configs + walk_error


def exact_total_means_conditioned(
    patterns: list[OrderedTree], dist: OffspringDistribution, n: int
) -> list[ExpectationResult]:
    """
    Exact ``E N_t(T_n) / n`` for several patterns, sharing one pass over the walk laws.

    A fringe subtree ``tau`` of size ``k`` occurs in ``T_n`` on average
    ``n P(T = tau) P(S_{n-k} = n-k) / P(S_n = n-1)`` times, so::

        E N_t(T_n) = n / P(S_n = n-1) * sum_k P(S_{n-k} = n-k) F_t(k)

    with ``F_t(k) = E[nu_t(T); |T| = k] = sum_m A(m) Q(m-|t|+1, k-|t|)`` and
    ``Q(j, N) = j/N P(S_N = N-j)`` the size law of a forest of ``j`` trees.
    Unlike ``limit_root_mean`` this carries the finite-``n`` bias, which is
    of order ``n^-1/2`` for patterns of height 2 or more.

    Raises:
        SizeError: ``n < 1``.
        SpanError: no tree of size ``n`` has positive probability.
    """
    if n < 1:
        raise SizeError(f"tree size must be at least 1, got {n}")
    _check_size(dist, n)
    p = dist.pmf[: n + 1]
    weights = []
    for pattern in patterns:
        convolved = np.ones(1)
        for d in pattern.degrees:
            convolved = np.convolve(convolved, WeightedDegreeMeasure.build(dist, d).weights)
        weights.append(convolved)

    # diagonal[N] = P(S_N = N); fringe[i][N] = F_t(|t| + N)
    diagonal = np.zeros(n + 1)
    fringe = [np.zeros(n + 1) for _ in patterns]
    walk = np.zeros(n + 1)
    walk[0] = 1.0
    for size in range(n + 1):
        diagonal[size] = walk[size]
        for pattern, a, f in zip(patterns, weights, fringe):
            s = pattern.size
            if size > n - s:
                continue
            if size == 0:
                f[0] = a[s - 1] if s - 1 < len(a) else 0.0
                continue
            top = min(size, len(a) - s)
            if top >= 1:
                j = np.arange(1, top + 1)
                f[size] = float(np.dot(a[s - 1 + j] * j, walk[size - j])) / size
        if size < n:
            walk = np.convolve(walk, p)[: n + 1]
    denominator = float(walk[n - 1])

    results = []
    for pattern, f in zip(patterns, fringe):
        s = pattern.size
        if n < s:
            results.append(ExpectationResult(value=0.0, provenance=("exact_total", "too_small")))
            continue
        # k = s + N runs over s..n; the matching diagonal entry is P(S_{n-k} = n-k)
        sizes = np.arange(n - s + 1)
        total = math.fsum((diagonal[n - s - sizes] * f[sizes]).tolist())
        value = total / denominator
        bound = 2.0 * n * dist.tail_mass * value / denominator if dist.tail_mass else 0.0
        results.append(ExpectationResult(value=value, error_bound=bound, provenance=("exact_total",)))
    logger.debug("exact total means", n=n, patterns=len(patterns))
    return results


def exact_total_mean_conditioned(
    pattern: OrderedTree, dist: OffspringDistribution, n: int
) -> ExpectationResult:
    """Exact ``E N_t(T_n) / n``; see :func:`exact_total_means_conditioned`."""
    return exact_total_means_conditioned([pattern], dist, n)[0]


def tree_size_prob(dist: OffspringDistribution, n: int) -> float:
    """``P(|T| = n) = P(S_n = n-1) / n`` (0 off the span lattice)."""
    if n < 1:
        raise SizeError(f"tree size must be at least 1, got {n}")
    return point_prob(dist, n, n - 1) / n
