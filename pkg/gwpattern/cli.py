"""
``gwpattern`` command line.

Machine output (JSON, CSV, parenthesis strings) goes to stdout or
``--out``; tables, verdict panels, progress and logs go to stderr.
Exit codes: 0 pass, 1 error, 2 verdict failure.
"""

import argparse
from collections.abc import Sequence
import io
import json
from pathlib import Path
import sys
from typing import Any

import numpy as np

from .core.console import get_console, get_err_console
from .core.errors import GwPatternError
from .core.settings import get_settings, set_settings
from .experiments.report import ExperimentReport, write_csv, write_report
from .experiments.suite import (
    run_clt,
    run_concentration,
    run_degree_histogram,
    run_heavy_tail_growth,
    run_llt_and_tails,
    run_lln,
    run_path_pairs,
)
from .logging.bridge import get_structured_logger, setup_logging
from .model.expectations import (
    exact_root_mean_conditioned,
    limit_root_mean,
    limit_root_mean_conditioned,
    tree_size_prob,
)
from .model.offspring import make_offspring, mean, span, variance
from .model.oracle import exact_conditioned_mean_by_enumeration
from .model.ordered_tree import (
    OrderedTree,
    degree_histogram,
    depth_profile,
    parse_parens,
    to_parens,
)
from .model.pattern_count import rooted_copies, rooted_copies_all
from .model.sampler import RngState, sample_conditioned
from .render.report_view import error_panel, render_report

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERDICT = 2

logger = get_structured_logger("gwpattern.cli")


def _int_list(text: str) -> list[int]:
    """``"500,1000,2000"`` or ``"500:5000:500"`` (inclusive range)."""
    try:
        if ":" in text:
            start, stop, step = (int(x) for x in text.split(":"))
            return list(range(start, stop + 1, step))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer list: {text!r}") from exc


def _read_tree(value: str) -> OrderedTree:
    """Parenthesis text, or the path of a file containing it."""
    text = value.strip()
    if not text.startswith("(") and Path(text).is_file():
        text = Path(text).read_text(encoding="utf-8")
    return parse_parens(text)


def _emit(text: str) -> None:
    get_console().out(text, highlight=False)


def _emit_json(data: dict[str, Any]) -> None:
    _emit(json.dumps(data, indent=2, default=str))


def _fresh_seed() -> int:
    # 64 bits of OS entropy; reported so the run can be repeated
    return int(np.random.SeedSequence().entropy) & ((1 << 64) - 1)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR.")
    parser.add_argument("--log-json", default=None, metavar="PATH", help="Also log JSON lines here.")


def _add_sampling(parser: argparse.ArgumentParser, *, n_list: bool) -> None:
    parser.add_argument("--dist", required=True, help="Offspring spec, e.g. geometric:0.5.")
    if n_list:
        parser.add_argument("--n-list", type=_int_list, required=True, help="Tree sizes.")
    else:
        parser.add_argument("--n", type=int, required=True, help="Tree size.")
    parser.add_argument("--replicates", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=None, help="Master seed (random if omitted).")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads.")


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, default=None, help="Write <out>.jsonl and <out>.json.")
    parser.add_argument("--format", choices=["json", "csv"], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwpattern",
        description="Pattern counts in conditioned Galton-Watson trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("limit", help="Limit constants of the root copy count.")
    p.add_argument("--dist", required=True)
    p.add_argument("--pattern", required=True, help="Pattern in parenthesis form.")
    _add_common(p)

    p = sub.add_parser("exact-mean", help="Exact E nu_t(T_n).")
    p.add_argument("--dist", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)
    _add_common(p)

    p = sub.add_parser("size-prob", help="P(|T| = n).")
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("sample", help="Sample T_n; one parenthesis string per line.")
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--count", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("count", help="Copies of a pattern in a host tree.")
    p.add_argument("--pattern", required=True)
    p.add_argument(
        "--tree", "--host", dest="tree", required=True,
        help="Host tree: parenthesis text or a file holding it.",
    )
    p.add_argument("--per-vertex", action="store_true", help="Also list nu_t at every vertex.")
    _add_common(p)

    p = sub.add_parser("tree", help="Size, depth profile and degree histogram of a tree.")
    p.add_argument("--tree", required=True, help="Parenthesis text or a file holding it.")
    _add_common(p)

    exp = sub.add_parser("experiment", help="Run a verification experiment.")
    kinds = exp.add_subparsers(dest="experiment", required=True)

    e = kinds.add_parser("lln", help="N_t(T_n)/n against its limit.")
    e.add_argument("--pattern", required=True)
    _add_sampling(e, n_list=True)

    e = kinds.add_parser("path-pairs", help="Pairs at distance l per vertex.")
    e.add_argument("--lengths", type=_int_list, required=True)
    _add_sampling(e, n_list=False)

    e = kinds.add_parser("concentration", help="Tightness of n - N_{P_k}(T_n).")
    e.add_argument("--k", type=int, required=True)
    _add_sampling(e, n_list=True)

    e = kinds.add_parser("clt", help="Standardized counts (data only).")
    e.add_argument("--pattern", required=True)
    _add_sampling(e, n_list=False)

    e = kinds.add_parser("degrees", help="Degree histogram X_r(T_n)/n against p_r.")
    e.add_argument("--r-max", type=int, default=None)
    _add_sampling(e, n_list=False)

    e = kinds.add_parser("heavy-tail", help="Growth of the star's exact mean under a heavy tail.")
    e.add_argument("--delta", type=int, required=True)
    e.add_argument("--eps", type=float, required=True)
    e.add_argument("--n-list", type=_int_list, required=True)
    e.add_argument("--dist", default=None, help="Override the heavy-tailed law.")

    e = kinds.add_parser("llt", help="Local limit ratio and tail suprema.")
    e.add_argument("--dist", required=True)
    e.add_argument("--n-list", type=_int_list, required=True)

    for choice in kinds.choices.values():
        _add_output(choice)
        _add_common(choice)
    return parser


def _cmd_limit(args: argparse.Namespace) -> int:
    dist = make_offspring(args.dist)
    pattern = parse_parens(args.pattern)
    unconditioned = limit_root_mean(pattern, dist)
    conditioned = limit_root_mean_conditioned(pattern, dist)
    _emit_json(
        {
            "dist": str(dist),
            "pattern": str(pattern),
            "mean": mean(dist),
            "variance": variance(dist),
            "span": span(dist),
            "limit_root_mean": unconditioned.model_dump(mode="json"),
            "limit_root_mean_conditioned": conditioned.model_dump(mode="json"),
        }
    )
    return EXIT_OK


def _cmd_exact_mean(args: argparse.Namespace) -> int:
    dist = make_offspring(args.dist)
    pattern = parse_parens(args.pattern)
    result = exact_root_mean_conditioned(pattern, dist, args.n)
    data: dict[str, Any] = {
        "dist": str(dist),
        "pattern": str(pattern),
        "n": args.n,
        **result.model_dump(mode="json"),
    }
    code = EXIT_OK
    if args.oracle:
        oracle = exact_conditioned_mean_by_enumeration(
            lambda tree: rooted_copies(pattern, tree), dist, args.n
        )
        agrees = abs(oracle - result.value) <= 1e-10 * max(1.0, abs(oracle))
        data.update(oracle=oracle, agrees=agrees)
        code = EXIT_OK if agrees else EXIT_VERDICT
    _emit_json(data)
    return code


def _cmd_size_prob(args: argparse.Namespace) -> int:
    dist = make_offspring(args.dist)
    _emit_json({"dist": str(dist), "n": args.n, "probability": tree_size_prob(dist, args.n)})
    return EXIT_OK


def _cmd_sample(args: argparse.Namespace) -> int:
    dist = make_offspring(args.dist)
    seed = _fresh_seed() if args.seed is None else args.seed
    logger.info("sampling", dist=str(dist), n=args.n, seed=seed, count=args.count)
    for i in range(args.count):
        tree = sample_conditioned(dist, args.n, RngState(seed, i, args.n).generator())
        _emit(to_parens(tree))
    return EXIT_OK


def _cmd_count(args: argparse.Namespace) -> int:
    pattern = parse_parens(args.pattern)
    host = _read_tree(args.tree)
    table = rooted_copies_all(pattern, host)
    data: dict[str, Any] = {"pattern": str(pattern), "host_size": host.size, "total": sum(table), "root": table[0]}
    if args.per_vertex:
        data["per_vertex"] = list(table)
    _emit_json(data)
    return EXIT_OK


def _cmd_tree(args: argparse.Namespace) -> int:
    tree = _read_tree(args.tree)
    _emit_json(
        {
            "size": tree.size,
            "height": tree.height,
            "lukasiewicz": list(tree.degrees),
            "depth_profile": list(depth_profile(tree)),
            "degree_histogram": list(degree_histogram(tree)),
        }
    )
    return EXIT_OK


def _run_experiment(args: argparse.Namespace) -> ExperimentReport:
    kind = args.experiment
    if getattr(args, "threads", None):
        set_settings(runner_threads=args.threads)
    if kind == "heavy-tail":
        dist = make_offspring(args.dist) if args.dist else None
        return run_heavy_tail_growth(args.delta, args.eps, args.n_list, dist)
    dist = make_offspring(args.dist)
    if kind == "llt":
        return run_llt_and_tails(dist, args.n_list)

    seed = _fresh_seed() if args.seed is None else args.seed
    if kind == "lln":
        return run_lln(parse_parens(args.pattern), dist, args.n_list, args.replicates, seed)
    if kind == "path-pairs":
        return run_path_pairs(args.lengths, dist, args.n, args.replicates, seed)
    if kind == "concentration":
        return run_concentration(args.k, dist, args.n_list, args.replicates, seed)
    if kind == "clt":
        return run_clt(parse_parens(args.pattern), dist, args.n, args.replicates, seed)
    return run_degree_histogram(dist, args.n, args.replicates, seed, args.r_max)


def _cmd_experiment(args: argparse.Namespace) -> int:
    report = _run_experiment(args)
    render_report(report, get_err_console())

    fmt = args.format or get_settings().output.format
    if args.out is not None:
        rows_path, summary_path = write_report(report, args.out)
        logger.info("report written", rows=str(rows_path), summary=str(summary_path))
        if fmt == "csv":
            with args.out.with_suffix(".csv").open("w", encoding="utf-8", newline="") as fh:
                write_csv(report, fh)
    elif fmt == "csv":
        buffer = io.StringIO()
        write_csv(report, buffer)
        _emit(buffer.getvalue().rstrip("\n"))
    else:
        _emit(report.model_dump_json(indent=2))

    if not report.valid:
        return EXIT_ERROR
    return EXIT_OK if report.passed else EXIT_VERDICT


_COMMANDS = {
    "limit": _cmd_limit,
    "exact-mean": _cmd_exact_mean,
    "size-prob": _cmd_size_prob,
    "sample": _cmd_sample,
    "count": _cmd_count,
    "tree": _cmd_tree,
    "experiment": _cmd_experiment,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = args.log_level or get_settings().output.log_level
    setup_logging(level=level, json_file=args.log_json)

    try:
        return _COMMANDS[args.command](args)
    except (GwPatternError, ValueError, IndexError) as exc:
        get_err_console().print(error_panel(exc))
        logger.error("command failed", command=args.command, error=str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
