try:
    from importlib.metadata import PackageNotFoundError, version

    try:
        __version__ = version("gwpattern")
    except PackageNotFoundError:
        __version__ = "0.3.0"
except ImportError:
    __version__ = "0.3.0"

from .core.console import Console, get_console, get_err_console, reset_console
from .core.errors import (
    BudgetError,
    CapExceeded,
    CriticalityError,
    DegenerateError,
    GwPatternError,
    NotATreeError,
    OracleCapError,
    ParseError,
    PreconditionError,
    ResourceError,
    SizeError,
    SpanError,
)
from .core.settings import Settings, get_settings, reset_settings, set_settings
from .experiments.report import ExperimentReport, ExperimentRow
from .experiments.suite import (
    run_clt,
    run_concentration,
    run_degree_histogram,
    run_heavy_tail_growth,
    run_llt_and_tails,
    run_lln,
    run_path_pairs,
)
from .logging.bridge import (
    StructuredLogger,
    get_logger,
    get_structured_logger,
    setup_logging,
)
from .model import (
    CHERRY,
    SINGLE,
    CopyCount,
    ExpectationResult,
    IntegerPmf,
    OffspringDistribution,
    OrderedTree,
    RngState,
    degree_histogram,
    depth_profile,
    exact_root_mean_conditioned,
    exact_total_mean_conditioned,
    factorial_binomial_moment,
    fringe,
    from_lukasiewicz,
    limit_root_mean,
    limit_root_mean_conditioned,
    local_limit_ratio,
    make_heavy_tail,
    make_offspring,
    make_path,
    make_star,
    make_two_path,
    mean,
    parse_parens,
    path_copies,
    point_prob,
    rooted_copies,
    rooted_copies_all,
    sample_conditioned,
    sample_unconditioned,
    span,
    star_copies,
    tail_bound_report,
    to_parens,
    total_copies,
    tree_size_prob,
    undirected_path_pairs,
    variance,
    walk_sum_pmf,
)

__all__ = [
    "CHERRY",
    "SINGLE",
    "BudgetError",
    "CapExceeded",
    "Console",
    "CopyCount",
    "CriticalityError",
    "DegenerateError",
    "ExpectationResult",
    "ExperimentReport",
    "ExperimentRow",
    "GwPatternError",
    "IntegerPmf",
    "NotATreeError",
    "OffspringDistribution",
    "OracleCapError",
    "OrderedTree",
    "ParseError",
    "PreconditionError",
    "ResourceError",
    "RngState",
    "Settings",
    "SizeError",
    "SpanError",
    "StructuredLogger",
    "degree_histogram",
    "depth_profile",
    "exact_root_mean_conditioned",
    "exact_total_mean_conditioned",
    "factorial_binomial_moment",
    "fringe",
    "from_lukasiewicz",
    "get_console",
    "get_err_console",
    "get_logger",
    "get_settings",
    "get_structured_logger",
    "limit_root_mean",
    "limit_root_mean_conditioned",
    "local_limit_ratio",
    "make_heavy_tail",
    "make_offspring",
    "make_path",
    "make_star",
    "make_two_path",
    "mean",
    "parse_parens",
    "path_copies",
    "point_prob",
    "reset_console",
    "reset_settings",
    "rooted_copies",
    "rooted_copies_all",
    "run_clt",
    "run_concentration",
    "run_degree_histogram",
    "run_heavy_tail_growth",
    "run_llt_and_tails",
    "run_lln",
    "run_path_pairs",
    "sample_conditioned",
    "sample_unconditioned",
    "set_settings",
    "span",
    "star_copies",
    "tail_bound_report",
    "to_parens",
    "total_copies",
    "tree_size_prob",
    "undirected_path_pairs",
    "variance",
    "walk_sum_pmf",
]
