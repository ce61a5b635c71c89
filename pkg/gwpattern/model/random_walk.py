"""
Distribution of ``S_n = xi_1 + ... + xi_n`` and numerical checks of its
local behaviour near ``n - m``.
"""

from dataclasses import dataclass
from functools import lru_cache
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import signal, stats

from ..core.errors import PreconditionError, ResourceError, SpanError
from ..core.settings import get_settings
from ..logging.bridge import get_structured_logger
from .offspring import OffspringDistribution, span, variance

Provenance = Literal["point", "closed_form", "convolution", "fft"]

logger = get_structured_logger(__name__)


@dataclass(frozen=True, eq=False)
class IntegerPmf:
    """
    Lattice distribution ``P(X = offset + i) = mass[i]``.

    ``deficiency`` is mass known to be missing: flushed underflow plus,
    for uncapped results, whatever the offspring truncation dropped.
    ``upper`` is set when values above it were deliberately not computed;
    entries up to ``upper`` are then exact for the stored offspring pmf.
    """

    offset: int
    mass: np.ndarray
    deficiency: float = 0.0
    upper: int | None = None
    provenance: Provenance = "convolution"
    flushed: float = 0.0

    def __post_init__(self) -> None:
        if np.any(self.mass < 0):
            raise ValueError("pmf entries must be nonnegative")
        self.mass.setflags(write=False)

    def prob(self, k: int) -> float:
        """``P(X = k)``; 0 outside the stored range."""
        i = k - self.offset
        if i < 0 or i >= len(self.mass):
            return 0.0
        return float(self.mass[i])

    @property
    def max_value(self) -> int:
        """Largest stored support point."""
        return self.offset + len(self.mass) - 1

    def total(self) -> float:
        """Stored mass (compensated sum)."""
        return math.fsum(self.mass.tolist())


def _convolve(a: np.ndarray, b: np.ndarray, fft_threshold: int) -> tuple[np.ndarray, bool]:
    if min(len(a), len(b)) >= fft_threshold:
        out = signal.fftconvolve(a, b)
        np.clip(out, 0.0, None, out=out)
        return out, True
    return np.convolve(a, b), False


def _closed_form_family(dist: OffspringDistribution) -> bool:
    # only when the dense truncation is negligible, so both paths agree
    return dist.family in ("poisson", "geometric", "binomial") and (
        dist.tail_mass <= get_settings().numerics.truncation_tail
    )


def _closed_form_pmf(dist: OffspringDistribution, n: int, k: np.ndarray) -> np.ndarray:
    if dist.family == "poisson":
        return np.asarray(stats.poisson.pmf(k, n * dist.params[0]), dtype=np.float64)
    if dist.family == "geometric":
        return np.asarray(stats.nbinom.pmf(k, n, dist.params[0]), dtype=np.float64)
    m, p = int(dist.params[0]), dist.params[1]
    return np.asarray(stats.binom.pmf(k, n * m, p), dtype=np.float64)


def _closed_form_upper(dist: OffspringDistribution, n: int) -> int:
    tail = get_settings().numerics.truncation_tail
    if dist.family == "poisson":
        return int(stats.poisson.isf(tail, n * dist.params[0])) + 1
    if dist.family == "geometric":
        return int(stats.nbinom.isf(tail, n, dist.params[0])) + 1
    return n * int(dist.params[0])


def walk_sum_pmf(
    dist: OffspringDistribution,
    n: int,
    cap: int | None = None,
    *,
    closed_form: bool = True,
) -> IntegerPmf:
    """
    Exact pmf of ``S_n`` (up to rounding and declared truncation).

    Args:
        dist: Offspring law.
        n: Number of summands, ``n >= 0``.
        cap: Only values ``<= cap`` are computed. Entries up to ``cap`` are
            unaffected by the cap; the heavy convolutions shrink to length
            ``cap + 1``.
        closed_form: Allow the Poisson / negative-binomial / binomial fast
            path. Disable to force generic convolution.

    Raises:
        ResourceError: the dense vector would exceed ``numerics.max_support``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    numerics = get_settings().numerics
    return _walk_sum_pmf(
        dist,
        n,
        cap,
        closed_form and _closed_form_family(dist),
        numerics.fft_threshold,
        numerics.flush_threshold,
        numerics.max_support,
    )


@lru_cache(maxsize=256)
def _walk_sum_pmf(
    dist: OffspringDistribution,
    n: int,
    cap: int | None,
    closed_form: bool,
    fft_threshold: int,
    flush_threshold: float,
    max_support: int,
) -> IntegerPmf:
    if n == 0:
        return IntegerPmf(0, np.ones(1), provenance="point")
    if cap is not None and cap < 0:
        return IntegerPmf(0, np.zeros(1), upper=cap, provenance="point")

    full_length = n * dist.max_degree + 1
    length = full_length if cap is None else min(full_length, cap + 1)

    if closed_form:
        upper = _closed_form_upper(dist, n) if cap is None else cap
        if upper + 1 > max_support:
            raise ResourceError(f"S_{n} support of {upper + 1} entries exceeds the cap {max_support}")
        mass = _closed_form_pmf(dist, n, np.arange(upper + 1))
        provenance: Provenance = "closed_form"
    else:
        if length > max_support:
            raise ResourceError(f"S_{n} support of {length} entries exceeds the cap {max_support}")
        mass, used_fft = _power(dist.pmf, n, length, fft_threshold)
        provenance = "fft" if used_fft else "convolution"

    tiny = (mass > 0) & (mass < flush_threshold)
    flushed = float(mass[tiny].sum())
    if flushed:
        mass = mass.copy()
        mass[tiny] = 0.0

    if cap is None:
        deficiency = max(0.0, 1.0 - math.fsum(mass.tolist()))
        if deficiency > n * 1e-12 + n * dist.tail_mass + flushed:
            logger.warning("S_n pmf deficiency above budget", n=n, deficiency=deficiency)
    else:
        deficiency = flushed

    if logger.is_enabled_for("debug"):
        mode = int(np.argmax(mass)) if len(mass) else 0
        logger.debug(
            "walk pmf", n=n, cap=cap, provenance=provenance, length=len(mass), mode=mode
        )
    return IntegerPmf(
        0, mass, deficiency=deficiency, upper=cap, provenance=provenance, flushed=flushed
    )


def _power(base: np.ndarray, n: int, length: int, fft_threshold: int) -> tuple[np.ndarray, bool]:
    """``base`` convolved with itself ``n`` times, keeping ``length`` leading entries."""
    result = np.ones(1)
    square = np.array(base[:length], dtype=np.float64)
    used_fft = False
    remaining = n
    while remaining:
        if remaining & 1:
            result, fft = _convolve(result, square, fft_threshold)
            result = result[:length]
            used_fft |= fft
        remaining >>= 1
        if remaining:
            square, fft = _convolve(square, square, fft_threshold)
            square = square[:length]
            used_fft |= fft
    return result, used_fft


def point_prob(dist: OffspringDistribution, n: int, k: int) -> float:
    """``P(S_n = k)``; 0 outside the support or off the span lattice."""
    if k < 0 or n < 0:
        return 0.0
    if n == 0:
        return 1.0 if k == 0 else 0.0
    if k % span(dist) != 0 or (dist.is_finite and k > n * dist.max_degree):
        return 0.0
    if _closed_form_family(dist):
        return float(_closed_form_pmf(dist, n, np.array([k]))[0])
    return walk_sum_pmf(dist, n, cap=k).prob(k)


class TailRow(BaseModel):
    """Per-n maxima of the scaled point probabilities ``P(S_n = n - m)``."""

    model_config = ConfigDict(frozen=True)

    n: int
    sqrt_n_p: float
    abs_m_p: float
    sqrt_n_m2_p: float
    argmax_sqrt_n_p: int
    argmax_abs_m_p: int
    argmax_sqrt_n_m2_p: int


class TailBoundReport(BaseModel):
    """Empirical constants (suprema over the grid) plus the per-n rows."""

    model_config = ConfigDict(frozen=True)

    distribution: str
    rows: list[TailRow]
    sup_sqrt_n_p: float
    sup_abs_m_p: float
    sup_sqrt_n_m2_p: float

    def suprema(self, n_max: int | None = None) -> tuple[float, float, float]:
        """Suprema restricted to rows with ``n <= n_max``."""
        rows = [r for r in self.rows if n_max is None or r.n <= n_max]
        return (
            max((r.sqrt_n_p for r in rows), default=0.0),
            max((r.abs_m_p for r in rows), default=0.0),
            max((r.sqrt_n_m2_p for r in rows), default=0.0),
        )


def tail_bound_report(
    dist: OffspringDistribution,
    n_grid: list[int],
    m_range: tuple[int, int] | None = None,
) -> TailBoundReport:
    """
    Scan ``sqrt(n) P``, ``|m| P`` and ``sqrt(n) m^2 P`` with ``P = P(S_n = n - m)``.

    ``m_range`` is an inclusive ``(m_lo, m_hi)``; by default ``m`` runs over
    ``n - k`` for ``k`` in ``[0, n + 8 sigma sqrt(n) + 8]``, which holds all
    but a negligible part of the mass.

    Raises:
        PreconditionError: infinite variance.
    """
    sigma2 = variance(dist)
    if not math.isfinite(sigma2):
        raise PreconditionError("tail bounds need a finite second moment")
    sigma = math.sqrt(sigma2)

    rows: list[TailRow] = []
    for n in sorted(set(n_grid)):
        if n < 1:
            continue
        if m_range is None:
            k_lo, k_hi = 0, n + math.ceil(8 * sigma * math.sqrt(n)) + 8
        else:
            k_lo, k_hi = max(0, n - m_range[1]), n - m_range[0]
        if k_hi < k_lo:
            continue
        pmf = walk_sum_pmf(dist, n, cap=k_hi)
        k = np.arange(k_lo, k_hi + 1)
        p = _window(pmf, k_lo, k_hi)
        m = (n - k).astype(np.float64)
        root = math.sqrt(n)
        scaled = (root * p, np.abs(m) * p, root * m * m * p)
        idx = [int(np.argmax(s)) for s in scaled]
        rows.append(
            TailRow(
                n=n,
                sqrt_n_p=float(scaled[0][idx[0]]),
                abs_m_p=float(scaled[1][idx[1]]),
                sqrt_n_m2_p=float(scaled[2][idx[2]]),
                argmax_sqrt_n_p=int(m[idx[0]]),
                argmax_abs_m_p=int(m[idx[1]]),
                argmax_sqrt_n_m2_p=int(m[idx[2]]),
            )
        )

    return TailBoundReport(
        distribution=str(dist),
        rows=rows,
        sup_sqrt_n_p=max((r.sqrt_n_p for r in rows), default=0.0),
        sup_abs_m_p=max((r.abs_m_p for r in rows), default=0.0),
        sup_sqrt_n_m2_p=max((r.sqrt_n_m2_p for r in rows), default=0.0),
    )


def _window(pmf: IntegerPmf, k_lo: int, k_hi: int) -> np.ndarray:
    out = np.zeros(k_hi - k_lo + 1)
    lo = max(k_lo, pmf.offset)
    hi = min(k_hi, pmf.max_value)
    if hi >= lo:
        out[lo - k_lo : hi - k_lo + 1] = pmf.mass[lo - pmf.offset : hi - pmf.offset + 1]
    return out


def local_limit_ratio(dist: OffspringDistribution, n: int) -> float:
    """
    ``P(S_n = n - 1) * sigma * sqrt(2 pi n) / h``, which tends to 1.

    Raises:
        SpanError: ``h`` does not divide ``n - 1``.
    """
    h = span(dist)
    if n < 1 or (n - 1) % h:
        raise SpanError(f"span {h} does not divide n - 1 = {n - 1}")
    sigma = math.sqrt(variance(dist))
    return point_prob(dist, n, n - 1) * sigma * math.sqrt(2 * math.pi * n) / h
