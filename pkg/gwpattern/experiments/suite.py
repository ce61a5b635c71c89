"""
Reproducible experiments checking the law of large numbers for pattern
counts and the random-walk estimates behind it.

Every ``run_*`` returns an :class:`ExperimentReport`. Input errors raise
before any work starts; errors in the middle of a run are caught and
produce a report with ``valid=False`` that keeps the finished rows.
"""

from collections.abc import Callable, Iterator
from contextlib import contextmanager
import math
import time
from typing import Any

import numpy as np
from scipy import stats

from ..core.errors import GwPatternError, PreconditionError, SpanError
from ..core.settings import VerdictConfig, get_settings
from ..logging.bridge import get_structured_logger
from ..model.expectations import (
    exact_root_mean_conditioned,
    exact_total_mean_conditioned,
    exact_total_means_conditioned,
    limit_root_mean,
    limit_root_mean_conditioned,
)
from ..model.offspring import (
    OffspringDistribution,
    make_heavy_tail,
    make_offspring,
    span,
    variance,
)
from ..model.ordered_tree import (
    OrderedTree,
    degree_histogram,
    make_path,
    make_star,
    make_two_path,
    parse_parens,
)
from ..model.pattern_count import path_copies, rooted_copies_all, undirected_path_pairs
from ..model.random_walk import local_limit_ratio, point_prob, tail_bound_report, walk_sum_pmf
from ..model.sampler import sample_conditioned
from .report import ExperimentReport, ExperimentRow, summarize, z_score
from .runner import run_replicates

logger = get_structured_logger(__name__)


def _check_sizes(dist: OffspringDistribution, n_list: list[int]) -> None:
    if not n_list:
        raise PreconditionError("need at least one tree size")
    h = span(dist)
    for n in n_list:
        if n < 1:
            raise PreconditionError(f"tree size must be positive, got {n}")
        if (n - 1) % h:
            raise SpanError(f"n = {n} is not reachable: span {h} does not divide {n - 1}")


def _check_replicates(replicates: int) -> None:
    if replicates < 2:
        raise PreconditionError("experiments need at least two replicates")


def _calibration(cfg: VerdictConfig, *names: str) -> dict[str, float]:
    return {name: float(getattr(cfg, name)) for name in names}


@contextmanager
def _guarded(report: ExperimentReport) -> Iterator[ExperimentReport]:
    """Time the run; turn runtime errors into an invalid report."""
    started = time.perf_counter()
    try:
        yield report
    except GwPatternError as exc:
        logger.warning("experiment aborted", experiment=report.experiment, error=str(exc))
        report.fail(exc)
    finally:
        report.elapsed_seconds = time.perf_counter() - started


def _row(
    n: int,
    values: list[float],
    reference: float | None,
    *,
    exact: float | None = None,
    label: str | None = None,
    extras: dict[str, float] | None = None,
) -> ExperimentRow:
    """Summarize one row; ``z`` is taken against ``exact`` when the finite-n mean is known."""
    mean, var, stderr = summarize(values)
    extras = dict(extras or {})
    if exact is not None:
        extras["exact_mean"] = exact
    return ExperimentRow(
        n=n,
        label=label,
        replicates=len(values),
        mean=mean,
        variance=var,
        stderr=stderr,
        reference=reference,
        z=z_score(mean, reference if exact is None else exact, stderr),
        extras=extras,
    )


def _band_verdicts(rows: list[ExperimentRow], cfg: VerdictConfig) -> dict[str, bool]:
    """
    Statistical band, relative band and z bound over all rows with a reference.

    The relative band compares the mean with the limit ``reference``. The
    stderr band and ``z`` are centred on the row's ``exact_mean`` extra when
    present, so a finite-n bias is not read as a failure. A row with zero
    standard error is a deterministic statistic; it is held to the relative
    band only.
    """
    judged = [r for r in rows if r.reference is not None]
    stderr_ok = True
    relative_ok = True
    z_ok = True
    for r in judged:
        assert r.reference is not None
        if math.isinf(r.reference):
            stderr_ok = relative_ok = z_ok = False
            continue
        gap = abs(r.mean - r.reference)
        relative_ok &= gap <= cfg.relative_band * max(abs(r.reference), 1e-300)
        if r.stderr > 0:
            centre = r.extras.get("exact_mean", r.reference)
            stderr_ok &= abs(r.mean - centre) <= cfg.stderr_band * r.stderr
            z_ok &= r.z is not None and abs(r.z) <= cfg.z_bound
    return {"stderr_band": stderr_ok, "relative_band": relative_ok, "z_bound": z_ok}


def run_lln(
    pattern: OrderedTree,
    dist: OffspringDistribution,
    n_list: list[int],
    replicates: int,
    seed: int,
) -> ExperimentReport:
    """
    Mean of ``N_t(T_n)/n`` against ``E nu_t(T)`` for each ``n``.

    The stderr band and ``z`` are centred on the exact finite-n mean, the
    relative band on the limit. Also compares the mean root count
    ``nu_t(T_n)`` with its exact value, which checks sampler, counter and
    formula against each other.
    """
    _check_sizes(dist, n_list)
    _check_replicates(replicates)
    cfg = get_settings().verdict
    limit = limit_root_mean(pattern, dist)
    report = ExperimentReport(
        experiment="lln",
        distribution=str(dist),
        pattern=str(pattern),
        n_values=list(n_list),
        replicates=replicates,
        seed=seed,
        inputs={"pattern": str(pattern), "dist": str(dist), "n_list": list(n_list),
                "replicates": replicates, "seed": seed},
        calibration=_calibration(cfg, "stderr_band", "relative_band", "z_bound"),
        constants={"limit_root_mean": limit.value, "limit_error_bound": limit.error_bound},
    )

    root_ok = True
    with _guarded(report):
        for n in n_list:

            def task(rng: np.random.Generator, n: int = n) -> tuple[float, float]:
                table = rooted_copies_all(pattern, sample_conditioned(dist, n, rng))
                return sum(table) / n, float(table[0])

            results = run_replicates(task, replicates, seed, phase=n, description=f"lln n={n}")
            per_vertex = [r[0] for r in results]
            root_values = [r[1] for r in results]
            root_mean, _, root_stderr = summarize(root_values)
            extras = {"root_mean": root_mean, "root_stderr": root_stderr}
            if n > pattern.size:
                exact = exact_root_mean_conditioned(pattern, dist, n).value
                root_z = z_score(root_mean, exact, root_stderr)
                extras.update(root_exact=exact, root_z=root_z if root_z is not None else math.nan)
                if root_stderr > 0:
                    root_ok &= abs(root_mean - exact) <= cfg.stderr_band * root_stderr
                else:
                    root_ok &= abs(root_mean - exact) <= 1e-9 * max(1.0, abs(exact))
            finite = exact_total_mean_conditioned(pattern, dist, n).value
            report.rows.append(_row(n, per_vertex, limit.value, exact=finite, extras=extras))
            logger.info("lln row", n=n, mean=report.rows[-1].mean)

    report.verdicts = {**_band_verdicts(report.rows, cfg), "root_consistency": root_ok}
    return report


def exact_path_pairs_mean(dist: OffspringDistribution, n: int, length: int) -> float:
    """
    Exact ``E V_l(T_n) / n``.

    Same decomposition as :func:`undirected_path_pairs`: the path on
    ``length + 1`` vertices plus ``t_{q, length-q}`` for ``q = 1..length-1``.
    """
    patterns = [make_path(length + 1)] + [make_two_path(q, length - q) for q in range(1, length)]
    return math.fsum(r.value for r in exact_total_means_conditioned(patterns, dist, n))


def run_path_pairs(
    lengths: list[int],
    dist: OffspringDistribution,
    n: int,
    replicates: int,
    seed: int,
) -> ExperimentReport:
    """
    ``V_l(T_n)/n``, pairs at distance ``l`` per vertex, against ``1 + (l-1) sigma^2 / 2``.

    At desk scale the finite-n bias exceeds the standard error, so the stderr band and
    ``z`` are centred on :func:`exact_path_pairs_mean`; the relative band
    stays on the limit.
    """
    if not lengths or min(lengths) < 1:
        raise PreconditionError("path lengths must be at least 1")
    _check_sizes(dist, [n])
    _check_replicates(replicates)
    cfg = get_settings().verdict
    sigma2 = variance(dist)
    report = ExperimentReport(
        experiment="path-pairs",
        distribution=str(dist),
        n_values=[n],
        replicates=replicates,
        seed=seed,
        inputs={"lengths": list(lengths), "dist": str(dist), "n": n,
                "replicates": replicates, "seed": seed},
        calibration=_calibration(cfg, "stderr_band", "relative_band", "z_bound"),
        constants={"variance": sigma2},
    )

    with _guarded(report):

        def task(rng: np.random.Generator) -> list[float]:
            tree = sample_conditioned(dist, n, rng)
            return [undirected_path_pairs(tree, ell) / n for ell in lengths]

        results = run_replicates(task, replicates, seed, phase=n, description=f"path pairs n={n}")
        for j, ell in enumerate(lengths):
            reference = 1.0 + (ell - 1) * sigma2 / 2.0
            exact = exact_path_pairs_mean(dist, n, ell)
            report.rows.append(
                _row(n, [r[j] for r in results], reference, exact=exact, label=f"l={ell}")
            )

    report.verdicts = _band_verdicts(report.rows, cfg)
    return report


def run_concentration(
    k: int,
    dist: OffspringDistribution,
    n_list: list[int],
    replicates: int,
    seed: int,
) -> ExperimentReport:
    """
    Distribution of ``n - N_{P_k}(T_n)``, which stays tight as ``n`` grows.

    Passes when the 95th percentile at the largest ``n`` is below
    ``concentration_growth`` times the one at the smallest ``n``.
    """
    if k < 2:
        raise PreconditionError("concentration needs a path with k >= 2 vertices")
    _check_sizes(dist, n_list)
    _check_replicates(replicates)
    cfg = get_settings().verdict
    report = ExperimentReport(
        experiment="concentration",
        distribution=str(dist),
        pattern=f"P_{k}",
        n_values=list(n_list),
        replicates=replicates,
        seed=seed,
        inputs={"k": k, "dist": str(dist), "n_list": list(n_list),
                "replicates": replicates, "seed": seed},
        calibration=_calibration(cfg, "concentration_growth"),
    )

    with _guarded(report):
        for n in n_list:

            def task(rng: np.random.Generator, n: int = n) -> float:
                return float(n - path_copies(sample_conditioned(dist, n, rng), k))

            gaps = run_replicates(task, replicates, seed, phase=n, description=f"P_{k} n={n}")
            q50, q90, q95 = (float(q) for q in np.quantile(np.asarray(gaps), [0.5, 0.9, 0.95]))
            extras = {"q50": q50, "q90": q90, "q95": q95, "max": max(gaps)}
            report.rows.append(_row(n, gaps, None, extras=extras))

    rows = sorted(report.rows, key=lambda r: r.n)
    if len(rows) >= 2:
        first, last = rows[0].extras["q95"], rows[-1].extras["q95"]
        ratio = last / first if first > 0 else (1.0 if last == 0 else math.inf)
        report.constants["q95_ratio"] = ratio
        report.verdicts["q95_growth"] = ratio < cfg.concentration_growth
    if k == 2:
        report.verdicts["deterministic"] = all(r.variance == 0 and r.mean == 1 for r in report.rows)
    return report


def is_degenerate_pair(pattern: OrderedTree, dist: OffspringDistribution) -> bool:
    """
    Pairs for which ``N_t(T_n)`` is a function of ``n``.

    Paths with at most two vertices always; stars under a full ``m``-ary law,
    where every degree count is fixed by ``n``; and any pattern with a vertex
    of higher degree than the law can produce, which never occurs.
    """
    if pattern.size <= 2:
        return True
    if dist.is_finite and pattern.max_degree > max(dist.support):
        return True
    is_star = all(d == 0 for d in pattern.degrees[1:])
    return dist.is_full_mary and is_star


def run_clt(
    pattern: OrderedTree,
    dist: OffspringDistribution,
    n: int,
    replicates: int,
    seed: int,
) -> ExperimentReport:
    """
    Standardized counts ``(N_t(T_n) - n mu_t) / sqrt(n)``, returned as data.

    No normality test. For bounded laws the variance is checked: exactly 0
    for degenerate pairs, positive otherwise when ``Delta_t >= 2``.
    """
    _check_sizes(dist, [n])
    _check_replicates(replicates)
    mu = limit_root_mean(pattern, dist).value
    report = ExperimentReport(
        experiment="clt",
        distribution=str(dist),
        pattern=str(pattern),
        n_values=[n],
        replicates=replicates,
        seed=seed,
        inputs={"pattern": str(pattern), "dist": str(dist), "n": n,
                "replicates": replicates, "seed": seed},
        constants={"mu": mu},
    )

    counts: list[int] = []
    with _guarded(report):

        def task(rng: np.random.Generator) -> int:
            return sum(rooted_copies_all(pattern, sample_conditioned(dist, n, rng)))

        counts = run_replicates(task, replicates, seed, phase=n, description=f"clt n={n}")
        root = math.sqrt(n)
        samples = [(c - n * mu) / root for c in counts]
        report.samples = samples
        mean, var, stderr = summarize(samples)
        report.rows.append(
            ExperimentRow(
                n=n,
                replicates=len(samples),
                mean=mean,
                variance=var,
                stderr=stderr,
                extras={"count_min": float(min(counts)), "count_max": float(max(counts))},
            )
        )

    if report.valid and dist.is_finite:
        if is_degenerate_pair(pattern, dist):
            report.verdicts["degenerate_variance_zero"] = len(set(counts)) == 1
        elif pattern.max_degree >= 2:
            report.verdicts["positive_variance"] = len(set(counts)) > 1
    return report


def run_heavy_tail_growth(
    delta: int,
    eps: float,
    n_list: list[int],
    dist: OffspringDistribution | None = None,
) -> ExperimentReport:
    """
    Exact ``E nu_star(T_n)`` for the ``delta``-star under a heavy-tailed law.

    The law defaults to ``p_m = c m^-(delta+1+eps)`` cut at ``max(n_list)``;
    that cut changes nothing here since ``T_n`` has degrees below ``n``. The
    log-log slope must lie in ``[(1-eps)/2 - slope_margin, slope_ceiling]``
    and ``E nu / sqrt(n)`` must decrease along ``n``.
    """
    if delta < 2 or not 0 < eps < 1:
        raise PreconditionError("heavy-tail growth needs delta >= 2 and 0 < eps < 1")
    if len(n_list) < 2:
        raise PreconditionError("a slope needs at least two tree sizes")
    if dist is None:
        dist = make_heavy_tail(delta, eps, max(max(n_list), 2))
    elif dist.is_finite:
        raise PreconditionError(f"{dist} has bounded support; there is no heavy tail")
    _check_sizes(dist, n_list)
    cfg = get_settings().verdict
    pattern = make_star(delta)
    lower = (1.0 - eps) / 2.0 - cfg.slope_margin
    report = ExperimentReport(
        experiment="heavy-tail",
        distribution=str(dist),
        pattern=str(pattern),
        n_values=sorted(n_list),
        inputs={"delta": delta, "eps": eps, "n_list": list(n_list), "dist": str(dist)},
        calibration={"slope_lower": lower, "slope_ceiling": cfg.slope_ceiling},
        constants={
            "limit_root_mean_conditioned": limit_root_mean_conditioned(pattern, dist).value
        },
    )

    with _guarded(report):
        for n in sorted(n_list):
            result = exact_root_mean_conditioned(pattern, dist, n)
            report.rows.append(
                ExperimentRow(
                    n=n,
                    mean=result.value,
                    extras={
                        "per_sqrt_n": result.value / math.sqrt(n),
                        "error_bound": result.error_bound,
                    },
                )
            )

    rows = report.rows
    if len(rows) >= 2:
        fit = stats.linregress(
            np.log([r.n for r in rows]), np.log([max(r.mean, 1e-300) for r in rows])
        )
        slope = float(fit.slope)
        report.constants["slope"] = slope
        report.constants["slope_stderr"] = float(fit.stderr)
        report.verdicts["slope_band"] = lower <= slope <= cfg.slope_ceiling
        scaled = [r.extras["per_sqrt_n"] for r in rows]
        report.verdicts["sqrt_n_decreasing"] = all(b < a for a, b in zip(scaled, scaled[1:]))
    return report


def run_llt_and_tails(dist: OffspringDistribution, n_grid: list[int]) -> ExperimentReport:
    """
    Local limit ratio per ``n`` plus the scaled point-probability suprema.

    Sizes off the span lattice are skipped and listed. Passes when the ratio
    at the largest valid ``n`` is within ``llt_tolerance`` of 1 and the
    suprema over the full grid exceed those over its lower half by less
    than ``tail_growth``.
    """
    if not n_grid:
        raise PreconditionError("need at least one n")
    cfg = get_settings().verdict
    h = span(dist)
    valid = sorted(n for n in set(n_grid) if n >= 1 and (n - 1) % h == 0)
    report = ExperimentReport(
        experiment="llt",
        distribution=str(dist),
        n_values=valid,
        inputs={"dist": str(dist), "n_grid": list(n_grid)},
        calibration=_calibration(cfg, "llt_tolerance", "tail_growth"),
        constants={"span": float(h), "variance": variance(dist)},
        skipped=sorted(n for n in set(n_grid) if n not in valid),
    )

    with _guarded(report):
        tails = tail_bound_report(dist, sorted(set(n_grid)))
        by_n = {row.n: row for row in tails.rows}
        for n in valid:
            ratio = local_limit_ratio(dist, n)
            tail = by_n[n]
            report.rows.append(
                ExperimentRow(
                    n=n,
                    mean=ratio,
                    reference=1.0,
                    extras={
                        "sqrt_n_p": tail.sqrt_n_p,
                        "abs_m_p": tail.abs_m_p,
                        "sqrt_n_m2_p": tail.sqrt_n_m2_p,
                    },
                )
            )

        if report.rows:
            last = report.rows[-1]
            report.verdicts["llt_ratio"] = abs(last.mean - 1.0) <= cfg.llt_tolerance
            n_max = max(r.n for r in tails.rows)
            half = tails.suprema(n_max // 2)
            full = tails.suprema()
            report.constants.update(sup_sqrt_n_p=full[0], sup_abs_m_p=full[1], sup_sqrt_n_m2_p=full[2])
            if half[0] > 0 and half[1] > 0:
                report.verdicts["tail_suprema_stable"] = all(
                    f <= (1.0 + cfg.tail_growth) * s for f, s in zip(full[:2], half[:2])
                )
    return report


def run_degree_histogram(
    dist: OffspringDistribution,
    n: int,
    replicates: int,
    seed: int,
    r_max: int | None = None,
) -> ExperimentReport:
    """
    Per-degree ``X_r(T_n)/n`` against ``p_r`` for ``r = 0..r_max``.

    ``z`` is taken against the exact finite-n mean of each row.
    """
    _check_sizes(dist, [n])
    _check_replicates(replicates)
    cfg = get_settings().verdict
    top = min(dist.max_degree, 10) if r_max is None else r_max
    if top < 0:
        raise PreconditionError("r_max must be nonnegative")
    report = ExperimentReport(
        experiment="degrees",
        distribution=str(dist),
        n_values=[n],
        replicates=replicates,
        seed=seed,
        inputs={"dist": str(dist), "n": n, "replicates": replicates, "seed": seed, "r_max": top},
        calibration=_calibration(cfg, "z_bound", "relative_band"),
    )

    with _guarded(report):

        def task(rng: np.random.Generator) -> list[float]:
            hist = degree_histogram(sample_conditioned(dist, n, rng))
            return [(hist[r] if r < len(hist) else 0) / n for r in range(top + 1)]

        results = run_replicates(task, replicates, seed, phase=n, description=f"degrees n={n}")
        # E X_r(T_n) / n = p_r P(S_{n-1} = n-1-r) / P(S_n = n-1)
        rest = walk_sum_pmf(dist, n - 1, cap=n - 1)
        denominator = point_prob(dist, n, n - 1)
        for r in range(top + 1):
            p_r = float(dist.pmf[r]) if r <= dist.max_degree else 0.0
            exact = p_r * rest.prob(n - 1 - r) / denominator if r <= n - 1 else 0.0
            report.rows.append(
                _row(n, [x[r] for x in results], p_r, exact=exact, label=f"r={r}")
            )

    z_ok = True
    for row in report.rows:
        assert row.reference is not None
        if row.stderr > 0:
            z_ok &= row.z is not None and abs(row.z) <= cfg.z_bound
        else:
            # deterministic count: X_r / n differs from p_r by O(1/n)
            z_ok &= abs(row.mean - row.reference) <= cfg.relative_band * max(row.reference, 1.0 / n)
    report.verdicts["z_bound"] = z_ok
    return report


EXPERIMENTS: dict[str, Callable[..., ExperimentReport]] = {
    "lln": run_lln,
    "path-pairs": run_path_pairs,
    "concentration": run_concentration,
    "clt": run_clt,
    "heavy-tail": run_heavy_tail_growth,
    "llt": run_llt_and_tails,
    "degrees": run_degree_histogram,
}


def rerun(report: ExperimentReport) -> ExperimentReport:
    """Run the experiment of ``report`` again from its recorded inputs."""
    inputs: dict[str, Any] = dict(report.inputs)
    if "dist" in inputs:
        inputs["dist"] = make_offspring(inputs["dist"])
    if "pattern" in inputs:
        inputs["pattern"] = parse_parens(inputs["pattern"])
    return EXPERIMENTS[report.experiment](**inputs)
