"""
Critical offspring distributions.

A distribution is stored as a dense pmf ``p_0..p_M`` plus the mass and mean
that were cut off beyond ``M``. Infinite families are truncated, never
renormalized: whatever lies beyond ``M`` stays visible through
``tail_mass``/``tail_mean`` and the tail bounds of
:meth:`OffspringDistribution.tail_factorial_moment`.

Spec grammar (``make_offspring``)::

    poisson:<lam>[:<M>]      geometric:<p>        binomial:<m>:<p>
    mary:<m>                 pmf:<p0,p1,...>      heavytail:<D>:<eps>:<M>[:<c>]
"""

from dataclasses import dataclass, field
from functools import cached_property, reduce
import math
import re
from typing import Literal, NamedTuple

import numpy as np
from scipy import special, stats

from ..core.errors import CriticalityError, DegenerateError, ParseError
from ..core.settings import get_settings
from ..logging.bridge import get_structured_logger

Family = Literal["poisson", "geometric", "binomial", "mary", "custom", "heavy_tail"]

FINITE_FAMILIES: frozenset[str] = frozenset({"binomial", "mary", "custom"})

_NORMALIZATION_SLACK = 1e-12

logger = get_structured_logger(__name__)


class Moment(NamedTuple):
    """A moment value with the bound on what truncation may have left out."""

    value: float
    error_bound: float = 0.0


@dataclass(frozen=True)
class OffspringDistribution:
    """
    Critical offspring law ``xi`` with ``E xi = 1``.

    Validated on construction: nonnegative entries, total mass one,
    criticality within ``tolerance`` and ``p_1 < 1``.
    """

    probs: tuple[float, ...]
    tail_mass: float = 0.0
    tail_mean: float = 0.0
    family: Family = "custom"
    params: tuple[float, ...] = ()
    tolerance: float = 1e-9
    spec: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.probs:
            raise ParseError("offspring pmf must have at least one entry")
        if any(p < 0 or not math.isfinite(p) for p in self.probs):
            raise ParseError("offspring probabilities must be finite and nonnegative")
        if self.tail_mass < 0 or self.tail_mean < 0:
            raise ParseError("tail mass and tail mean must be nonnegative")
        if len(self.probs) > 1 and self.probs[1] >= 1.0:
            raise DegenerateError("p_1 = 1 gives the infinite path; variance must be positive")

        total = math.fsum(self.probs) + self.tail_mass
        if abs(total - 1.0) > _NORMALIZATION_SLACK:
            raise ParseError(f"probabilities sum to {total!r}, expected 1")

        mean = math.fsum(i * p for i, p in enumerate(self.probs)) + self.tail_mean
        if abs(mean - 1.0) > self.tolerance:
            raise CriticalityError(
                f"offspring mean is {mean:.12g}; a critical law needs mean 1 "
                f"(tolerance {self.tolerance:g})"
            )

    @cached_property
    def pmf(self) -> np.ndarray:
        """Dense pmf as a read-only float64 array."""
        array = np.asarray(self.probs, dtype=np.float64)
        array.setflags(write=False)
        return array

    @property
    def max_degree(self) -> int:
        """Largest degree stored densely (``M``)."""
        return len(self.probs) - 1

    @property
    def is_finite(self) -> bool:
        """True when the law has bounded support and nothing was truncated."""
        return self.family in FINITE_FAMILIES

    @property
    def support(self) -> tuple[int, ...]:
        """Degrees with positive mass in the dense part."""
        return tuple(i for i, p in enumerate(self.probs) if p > 0)

    @property
    def tail_exponent(self) -> float | None:
        """``alpha`` with ``p_m ~ c m^-alpha`` beyond ``M`` (heavy-tail family only)."""
        if self.family != "heavy_tail":
            return None
        delta, eps = self.params[0], self.params[1]
        return delta + 1.0 + eps

    @property
    def is_full_mary(self) -> bool:
        """Support contained in ``{0, m}`` for a single ``m >= 2``."""
        positive = [i for i in self.support if i > 0]
        return self.is_finite and len(positive) == 1 and positive[0] >= 2

    def tail_factorial_moment(self, d: int) -> Moment:
        """
        Contribution of degrees beyond ``M`` to ``E C(xi, d)``.

        For Poisson and geometric laws the tail is summed in closed form and
        the returned ``error_bound`` is 0 (``value`` is the exact tail). For
        the heavy-tail family only an upper bound is available: ``value`` is
        0 and ``error_bound`` the bound, ``inf`` when the moment diverges.
        """
        M = self.max_degree
        if self.family == "poisson":
            lam = self.params[0]
            tail = lam**d / math.factorial(d) * float(stats.poisson.sf(M - d, lam))
            return Moment(tail)
        if self.family == "geometric":
            p = self.params[0]
            q = 1.0 - p
            tail = (q / p) ** d * float(stats.nbinom.sf(M - d, d + 1, p))
            return Moment(tail)
        if self.family == "heavy_tail":
            # mass and mean of the cut tail are stored exactly
            if d == 0:
                return Moment(self.tail_mass)
            if d == 1:
                return Moment(self.tail_mean)
            alpha = self.tail_exponent
            c = self.params[3]
            assert alpha is not None
            if alpha - d <= 1.0:
                return Moment(0.0, math.inf)
            bound = c / math.factorial(d) * float(special.zeta(alpha - d, M + 1))
            return Moment(0.0, bound)
        return Moment(0.0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """
        Draw ``size`` i.i.d. offspring counts.

        Parametric families whose dense cut is negligible use numpy's exact
        generators. Everything else draws from the stored pmf, which
        conditions on ``xi <= M`` when a tail was cut.
        """
        native = self.tail_mass <= get_settings().numerics.truncation_tail
        if native and self.family == "poisson":
            return rng.poisson(self.params[0], size=size)
        if native and self.family == "geometric":
            return rng.geometric(self.params[0], size=size) - 1
        if self.family == "binomial":
            return rng.binomial(int(self.params[0]), self.params[1], size=size)
        weights = self.pmf / self.pmf.sum()
        return rng.choice(len(weights), size=size, p=weights)

    def to_dict(self) -> dict[str, object]:
        """Serialized form used in experiment reports."""
        return {
            "spec": self.spec,
            "family": self.family,
            "params": list(self.params),
            "probs": list(self.probs),
            "tail_mass": self.tail_mass,
        }

    def __str__(self) -> str:
        return self.spec or f"pmf:{','.join(f'{p:g}' for p in self.probs)}"


def factorial_binomial_moment(dist: OffspringDistribution, d: int) -> Moment:
    """
    ``E C(xi, d) = sum_m p_m C(m, d)`` with compensated summation.

    Exact on finite support. For truncated families the closed-form tail is
    added when known, otherwise its bound is returned as ``error_bound``;
    a divergent moment has ``value = inf``.
    """
    if d < 0:
        raise ValueError("d must be nonnegative")
    head = math.fsum(
        p * math.comb(m, d) for m, p in enumerate(dist.probs) if m >= d and p > 0
    )
    tail = dist.tail_factorial_moment(d)
    if math.isinf(tail.error_bound):
        return Moment(math.inf, math.inf)
    return Moment(head + tail.value, tail.error_bound)


def mean(dist: OffspringDistribution) -> float:
    """``E xi`` including the truncated tail."""
    return math.fsum(i * p for i, p in enumerate(dist.probs)) + dist.tail_mean


def variance(dist: OffspringDistribution) -> float:
    """``Var xi = 2 E C(xi,2) + E xi - (E xi)^2``; ``inf`` when the second moment diverges."""
    second = factorial_binomial_moment(dist, 2).value
    mu = mean(dist)
    return 2.0 * second + mu - mu * mu


def span(dist: OffspringDistribution) -> int:
    """``gcd{i >= 1 : p_i > 0}``; the lattice on which ``S_n`` lives."""
    positive = [i for i in dist.support if i >= 1]
    if dist.tail_mass > 0:
        # an untruncated tail has consecutive support points
        return 1
    return reduce(math.gcd, positive, 0) or 1


_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_SPEC_PATTERNS: dict[str, re.Pattern[str]] = {
    "poisson": re.compile(rf"poisson:({_NUMBER})(?::(\d+))?"),
    "geometric": re.compile(rf"geometric:({_NUMBER})"),
    "binomial": re.compile(rf"binomial:(\d+):({_NUMBER})"),
    "mary": re.compile(r"mary:(\d+)"),
    "pmf": re.compile(rf"pmf:({_NUMBER}(?:,{_NUMBER})*)"),
    "heavytail": re.compile(rf"heavytail:(\d+):({_NUMBER}):(\d+)(?::({_NUMBER}))?"),
}


def make_offspring(spec: str, tolerance: float | None = None) -> OffspringDistribution:
    """
    Build a validated distribution from its textual spec.

    Raises:
        ParseError: malformed spec.
        CriticalityError: mean differs from 1 beyond the tolerance.
        DegenerateError: ``p_1 = 1``.
    """
    settings = get_settings().numerics
    tol = settings.criticality_tolerance if tolerance is None else tolerance
    text = spec.strip().lower()
    kind = text.split(":", 1)[0]
    pattern = _SPEC_PATTERNS.get(kind)
    match = pattern.fullmatch(text) if pattern else None
    if match is None:
        raise ParseError(f"cannot parse offspring spec {spec!r}")

    if kind == "poisson":
        lam = float(match.group(1))
        if lam <= 0:
            raise ParseError("poisson rate must be positive")
        cut = int(match.group(2)) if match.group(2) else _poisson_cutoff(lam, settings.truncation_tail)
        return _poisson(lam, cut, tol, text)
    if kind == "geometric":
        p = float(match.group(1))
        if not 0 < p < 1:
            raise ParseError("geometric parameter must lie in (0, 1)")
        return _geometric(p, settings.truncation_tail, tol, text)
    if kind == "binomial":
        m, p = int(match.group(1)), float(match.group(2))
        if m < 1 or not 0 <= p <= 1:
            raise ParseError("binomial needs m >= 1 and p in [0, 1]")
        probs = tuple(float(x) for x in stats.binom.pmf(np.arange(m + 1), m, p))
        return OffspringDistribution(probs, family="binomial", params=(m, p), tolerance=tol, spec=text)
    if kind == "mary":
        m = int(match.group(1))
        if m < 2:
            raise ParseError("full m-ary law needs m >= 2")
        probs = [0.0] * (m + 1)
        probs[0] = 1.0 - 1.0 / m
        probs[m] = 1.0 / m
        return OffspringDistribution(tuple(probs), family="mary", params=(m,), tolerance=tol, spec=text)
    if kind == "pmf":
        probs = tuple(float(x) for x in match.group(1).split(","))
        while len(probs) > 1 and probs[-1] == 0.0:
            probs = probs[:-1]
        return OffspringDistribution(probs, family="custom", tolerance=tol, spec=text)

    delta, eps, cut = int(match.group(1)), float(match.group(2)), int(match.group(3))
    c = float(match.group(4)) if match.group(4) else None
    return make_heavy_tail(delta, eps, cut, c=c, tolerance=tol)


def make_heavy_tail(
    delta: int,
    eps: float,
    cutoff: int,
    *,
    c: float | None = None,
    tolerance: float | None = None,
) -> OffspringDistribution:
    """
    Heavy-tailed critical law with ``p_m = c m^-(delta+1+eps)`` for ``m >= 2``.

    ``p_0`` and ``p_1`` are solved from ``sum p = 1`` and ``sum m p = 1``.
    The default ``c`` is the largest admissible one (``p_1 = 0``), which
    puts as much weight as possible in the tail.
    """
    if delta < 1 or eps <= 0 or cutoff < 2:
        raise ParseError("heavy tail needs delta >= 1, eps > 0 and cutoff >= 2")
    tol = get_settings().numerics.criticality_tolerance if tolerance is None else tolerance
    alpha = delta + 1.0 + eps
    z_mass = float(special.zeta(alpha, 2))
    z_mean = float(special.zeta(alpha - 1.0, 2))
    c_max = 1.0 / z_mean
    if c is None:
        c = c_max
    if c <= 0 or c > c_max * (1 + 1e-12):
        raise CriticalityError(
            f"no p_0, p_1 >= 0 give mean 1 with tail constant c={c:g} (max {c_max:.6g})"
        )
    p1 = max(0.0, 1.0 - c * z_mean)
    p0 = 1.0 - p1 - c * z_mass
    m = np.arange(2, cutoff + 1, dtype=np.float64)
    body = c * m ** (-alpha)
    probs = (p0, p1, *(float(x) for x in body))
    tail_mass = c * float(special.zeta(alpha, cutoff + 1))
    tail_mean = c * float(special.zeta(alpha - 1.0, cutoff + 1))
    # fold float error of the zeta identities into p_0
    drift = math.fsum(probs) + tail_mass - 1.0
    probs = (p0 - drift, *probs[1:])
    text = f"heavytail:{delta}:{eps:g}:{cutoff}"
    logger.debug("heavy-tail law built", delta=delta, eps=eps, cutoff=cutoff, c=c, tail_mass=tail_mass)
    return OffspringDistribution(
        probs,
        tail_mass=tail_mass,
        tail_mean=tail_mean,
        family="heavy_tail",
        params=(delta, eps, cutoff, c),
        tolerance=tol,
        spec=text,
    )


def _poisson_cutoff(lam: float, tail: float) -> int:
    """Smallest ``M`` with ``P(Po(lam) > M) <= tail``."""
    return int(stats.poisson.isf(tail, lam)) + 1


def _poisson(lam: float, cut: int, tol: float, text: str) -> OffspringDistribution:
    k = np.arange(cut + 1)
    probs = tuple(float(x) for x in stats.poisson.pmf(k, lam))
    tail_mass = float(stats.poisson.sf(cut, lam))
    # sum_{m>M} m p_m = lam * P(Po(lam) >= M)
    tail_mean = lam * float(stats.poisson.sf(cut - 1, lam))
    return OffspringDistribution(
        probs,
        tail_mass=tail_mass,
        tail_mean=tail_mean,
        family="poisson",
        params=(lam, cut),
        tolerance=tol,
        spec=text,
    )


def _geometric(p: float, tail: float, tol: float, text: str) -> OffspringDistribution:
    q = 1.0 - p
    cut = max(1, math.ceil(math.log(tail) / math.log(q)) - 1)
    k = np.arange(cut + 1)
    probs = tuple(float(x) for x in p * q**k)
    tail_mass = q ** (cut + 1)
    # sum_{m>M} m p q^m = q^(M+1) (M + 1/p)
    tail_mean = q ** (cut + 1) * (cut + 1.0 / p)
    return OffspringDistribution(
        probs,
        tail_mass=tail_mass,
        tail_mean=tail_mean,
        family="geometric",
        params=(p, cut),
        tolerance=tol,
        spec=text,
    )
