import math

import pytest

from gwpattern.model.offspring import make_offspring
from gwpattern.model.ordered_tree import (
    CHERRY,
    SINGLE,
    fringe,
    make_path,
    make_star,
    make_two_path,
    parse_parens,
    to_parens,
)
from gwpattern.model.pattern_count import (
    path_copies,
    rooted_copies,
    rooted_copies_all,
    star_copies,
    total_copies,
    undirected_path_pairs,
)

FIVE = parse_parens("((()())())")
FULL_BINARY_7 = parse_parens("((()())(()()))")

HOST_SPECS = ["geometric:0.5", "binomial:2:0.5", "pmf:0.5,0,0.5", "mary:3"]


class TestRootedCopies:
    """Tests for copies anchored at each host vertex."""

    def test_cherry_in_star(self):
        """A 3-star holds three cherries at its root."""
        assert rooted_copies_all(CHERRY, make_star(3)) == (3, 0, 0, 0)

    def test_cherry_in_five(self):
        """((()())()) has a cherry at the root and at vertex 1."""
        assert rooted_copies_all(CHERRY, FIVE) == (1, 1, 0, 0, 0)
        assert total_copies(CHERRY, FIVE) == 2

    def test_root_only(self):
        """rooted_copies is the first entry."""
        assert rooted_copies(CHERRY, make_star(4)) == 6

    def test_single_node_everywhere(self):
        """The single node embeds once at every vertex."""
        assert rooted_copies_all(SINGLE, FIVE) == (1,) * 5

    def test_order_matters(self):
        """t_{1,2} and t_{2,1} are different ordered patterns."""
        host = parse_parens("((())())")
        assert rooted_copies(make_two_path(2, 1), host) == 1
        assert rooted_copies(make_two_path(1, 2), host) == 0

    def test_pattern_larger_than_host(self):
        """A pattern that does not fit has no copies."""
        assert total_copies(make_star(3), CHERRY) == 0

    def test_fringe_consistency(self, random_trees):
        """The count at v equals the rooted count in the fringe subtree at v."""
        pattern = parse_parens("((()())())")
        for host in random_trees(make_offspring("geometric:0.5"), 40, 5, 11):
            counts = rooted_copies_all(pattern, host)
            for v in range(host.size):
                assert counts[v] == rooted_copies(pattern, fringe(host, v))

    def test_exact_integers(self):
        """Counts stay exact far beyond float precision."""
        host = make_star(200)
        assert rooted_copies(make_star(100), host) == math.comb(200, 100)


class TestTotalCopies:
    """Tests for whole-tree counts and their closed forms."""

    def test_full_binary_seven(self):
        """A full binary tree on seven vertices has three cherries."""
        assert total_copies(CHERRY, FULL_BINARY_7) == 3

    def test_single_node_counts_vertices(self, random_trees):
        """N_{P_1}(T) = |T|."""
        for host in random_trees(make_offspring("poisson:1"), 31, 4, 3):
            assert total_copies(SINGLE, host) == host.size

    def test_edge_counts(self, random_trees):
        """N_{P_2}(T) = |T| - 1."""
        for host in random_trees(make_offspring("poisson:1"), 31, 4, 4):
            assert total_copies(make_path(2), host) == host.size - 1

    @pytest.mark.parametrize("spec", HOST_SPECS)
    @pytest.mark.parametrize("k", [1, 2, 3, 5])
    def test_path_closed_form(self, random_trees, spec, k):
        """path_copies agrees with the general DP."""
        for host in random_trees(make_offspring(spec), 25, 3, 17):
            assert path_copies(host, k) == total_copies(make_path(k), host)

    @pytest.mark.parametrize("spec", HOST_SPECS)
    @pytest.mark.parametrize("delta", [0, 1, 2, 3])
    def test_star_closed_form(self, random_trees, spec, delta):
        """star_copies agrees with the general DP."""
        for host in random_trees(make_offspring(spec), 25, 3, 19):
            assert star_copies(host, delta) == total_copies(make_star(delta), host)

    @pytest.mark.parametrize("pattern_text", ["(()())", "((()))", "((())())", "(()()())"])
    def test_grafting_never_decreases(self, random_trees, pattern_text):
        """Attaching a subtree at any vertex keeps every old copy."""
        pattern = parse_parens(pattern_text)
        dist = make_offspring("geometric:0.5")
        hosts = random_trees(dist, 30, 6, 41)
        grafts = random_trees(dist, 4, 6, 42)
        for host, graft in zip(hosts, grafts):
            text = to_parens(host)
            before = total_copies(pattern, host)
            for i in (j for j, c in enumerate(text) if c == "("):
                grown = parse_parens(text[: i + 1] + to_parens(graft) + text[i + 1 :])
                assert grown.size == host.size + graft.size
                assert total_copies(pattern, grown) >= before


class TestClosedForms:
    """Tests for path, star and distance-pair counts on fixed trees."""

    def test_path_three(self):
        """((()())()) has two vertices at depth 2."""
        assert path_copies(FIVE, 3) == 2

    def test_path_too_long(self):
        """A path longer than the height has no copies."""
        assert path_copies(FIVE, 4) == 0

    def test_star_five_choose_three(self):
        """A 5-star holds C(5, 3) three-stars."""
        assert star_copies(make_star(5), 3) == 10

    @pytest.mark.parametrize(("length", "pairs"), [(1, 4), (2, 4), (3, 2), (4, 0)])
    def test_undirected_pairs(self, length, pairs):
        """Pairs at each distance in ((()())())."""
        assert undirected_path_pairs(FIVE, length) == pairs

    def test_pairs_total(self):
        """Summed over all distances every unordered pair is counted once."""
        host = parse_parens("(((())())(()()())())")
        total = sum(undirected_path_pairs(host, length) for length in range(1, host.size))
        assert total == host.size * (host.size - 1) // 2

    @pytest.mark.parametrize(
        ("call", "arg"),
        [(path_copies, 0), (star_copies, -1), (undirected_path_pairs, 0)],
    )
    def test_invalid_arguments(self, call, arg):
        """Out-of-range pattern sizes raise ValueError."""
        with pytest.raises(ValueError):
            call(FIVE, arg)
