from .expectations import (
    ExpectationResult,
    WeightedDegreeMeasure,
    exact_root_mean_conditioned,
    exact_total_mean_conditioned,
    exact_total_means_conditioned,
    limit_root_mean,
    limit_root_mean_conditioned,
    tree_size_prob,
)
from .offspring import (
    Moment,
    OffspringDistribution,
    factorial_binomial_moment,
    make_heavy_tail,
    make_offspring,
    mean,
    span,
    variance,
)
from .ordered_tree import (
    CHERRY,
    SINGLE,
    OrderedTree,
    degree_histogram,
    depth_profile,
    fringe,
    from_lukasiewicz,
    make_path,
    make_star,
    make_two_path,
    parse_parens,
    to_parens,
)
from .pattern_count import (
    CopyCount,
    path_copies,
    rooted_copies,
    rooted_copies_all,
    star_copies,
    total_copies,
    undirected_path_pairs,
)
from .random_walk import (
    IntegerPmf,
    TailBoundReport,
    local_limit_ratio,
    point_prob,
    tail_bound_report,
    walk_sum_pmf,
)
from .sampler import RngState, sample_conditioned, sample_unconditioned

__all__ = [
    "CHERRY",
    "SINGLE",
    "CopyCount",
    "ExpectationResult",
    "IntegerPmf",
    "Moment",
    "OffspringDistribution",
    "OrderedTree",
    "RngState",
    "TailBoundReport",
    "WeightedDegreeMeasure",
    "degree_histogram",
    "depth_profile",
    "exact_root_mean_conditioned",
    "exact_total_mean_conditioned",
    "exact_total_means_conditioned",
    "factorial_binomial_moment",
    "fringe",
    "from_lukasiewicz",
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
    "rooted_copies",
    "rooted_copies_all",
    "sample_conditioned",
    "sample_unconditioned",
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
