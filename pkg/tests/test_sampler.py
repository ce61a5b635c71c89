from collections import Counter

import numpy as np
import pytest
from scipy import stats

from gwpattern.core.errors import BudgetError, CapExceeded, SpanError
from gwpattern.model.offspring import make_offspring, span
from gwpattern.model.oracle import enumerate_ordered_trees, tree_weight
from gwpattern.model.ordered_tree import CHERRY, SINGLE, OrderedTree, make_path
from gwpattern.model.sampler import (
    RngState,
    cycle_lemma_rotation,
    sample_conditioned,
    sample_unconditioned,
)

CHI_SQUARE_DISTS = [
    "geometric:0.5",
    "poisson:1",
    "poisson:1:12",
    "binomial:2:0.5",
    "binomial:4:0.25",
    "pmf:0.5,0,0.5",
    "mary:3",
]


def _chi_square_pvalue(spec: str, n: int, draws: int, seed: int) -> float:
    dist = make_offspring(spec)
    trees = [t for t in enumerate_ordered_trees(n) if tree_weight(t, dist) > 0]
    weights = np.array([tree_weight(t, dist) for t in trees])
    expected = weights / weights.sum() * draws
    gen = np.random.default_rng(seed)
    seen = Counter(sample_conditioned(dist, n, gen) for _ in range(draws))
    observed = np.array([seen[t] for t in trees], dtype=np.float64)
    assert observed.sum() == draws
    return float(stats.chisquare(observed, expected).pvalue)


class TestRngState:
    """Tests for seed-derived generator streams."""

    def test_same_state_same_draws(self):
        """Equal states give identical streams."""
        a = RngState(42, 3, 101).generator().integers(0, 1 << 30, 10)
        b = RngState(42, 3, 101).generator().integers(0, 1 << 30, 10)
        assert a.tolist() == b.tolist()

    def test_streams_differ(self):
        """Different stream indices give different draws."""
        a = RngState(42, 0).generator().random(5)
        b = RngState(42, 1).generator().random(5)
        assert a.tolist() != b.tolist()

    def test_phase_separates_sizes(self):
        """The phase changes the stream even for the same replicate index."""
        a = RngState(42, 0, 100).generator().random(5)
        b = RngState(42, 0, 101).generator().random(5)
        assert a.tolist() != b.tolist()

    def test_derive(self):
        """derive keeps seed and phase and swaps the stream."""
        assert RngState(7, 0, 9).derive(5) == RngState(7, 5, 9)


class TestCycleLemma:
    """Tests for the rotation that turns a bridge into a tree word."""

    def test_first_minimum(self):
        """Steps (-1, +1, -1) rotate to start at index 1."""
        degrees = np.array([0, 2, 0])
        start = cycle_lemma_rotation(degrees)
        assert start == 1
        assert OrderedTree(tuple(int(x) for x in np.roll(degrees, -start))) == CHERRY

    def test_already_a_word(self):
        """A Lukasiewicz word rotates by 0."""
        assert cycle_lemma_rotation(np.array([2, 0, 1, 0])) == 0

    def test_every_rotation_maps_back(self):
        """All cyclic shifts of a word rotate to the same tree."""
        word = np.array([2, 1, 0, 3, 0, 0, 0])
        for shift in range(len(word)):
            rotated = np.roll(word, shift)
            start = cycle_lemma_rotation(rotated)
            assert tuple(np.roll(rotated, -start).tolist()) == tuple(word.tolist())

    def test_wrong_sum(self):
        """Degree sums other than n - 1 are rejected."""
        with pytest.raises(ValueError):
            cycle_lemma_rotation(np.array([1, 1, 0]))


class TestSampleConditioned:
    """Tests for exact size-conditioned draws."""

    def test_size_one(self, poisson, rng):
        """n = 1 is the single node."""
        assert sample_conditioned(poisson, 1, rng) == SINGLE

    def test_size_two(self, geometric, rng):
        """n = 2 is the edge."""
        assert sample_conditioned(geometric, 2, rng) == make_path(2)

    @pytest.mark.parametrize("spec", ["poisson:1", "geometric:0.5", "binomial:2:0.5", "mary:3"])
    def test_sizes_and_words(self, spec, rng):
        """Samples have exactly n vertices and valid degree words."""
        dist = make_offspring(spec)
        for n in (4, 10, 100):
            tree = sample_conditioned(dist, n, rng)
            assert tree.size == n
            assert sum(tree.degrees) == n - 1

    def test_span_violation(self, full_binary, rng):
        """Even sizes are impossible for the full binary law."""
        with pytest.raises(SpanError):
            sample_conditioned(full_binary, 10, rng)

    def test_invalid_size(self, poisson, rng):
        """n below 1 is rejected."""
        with pytest.raises(ValueError):
            sample_conditioned(poisson, 0, rng)

    def test_budget(self, poisson, rng):
        """A tiny rejection budget is exhausted on a large tree."""
        with pytest.raises(BudgetError):
            sample_conditioned(poisson, 200_000, rng, budget=1)

    def test_full_binary_counts(self, full_binary, rng):
        """Full binary trees of size 2k+1 have k inner vertices."""
        tree = sample_conditioned(full_binary, 101, rng)
        assert tree.degrees.count(2) == 50

    def test_deterministic(self, binary):
        """The same state yields the same tree."""
        a = sample_conditioned(binary, 80, RngState(5, 2, 80).generator())
        b = sample_conditioned(binary, 80, RngState(5, 2, 80).generator())
        assert a == b

    @pytest.mark.parametrize(("spec", "n"), [("geometric:0.5", 5), ("binomial:2:0.5", 6), ("poisson:1", 5)])
    def test_uniform_over_weights(self, spec, n):
        """Frequencies match the enumerated tree weights."""
        assert _chi_square_pvalue(spec, n, 4000, 2024) > 1e-3

    @pytest.mark.slow
    @pytest.mark.parametrize(("spec", "n"), [("geometric:0.5", 8), ("binomial:2:0.5", 8), ("pmf:0.5,0,0.5", 9)])
    def test_uniform_over_weights_large(self, spec, n):
        """Chi-square goodness of fit at full scale."""
        assert _chi_square_pvalue(spec, n, 100_000, 99) > 1e-3

    @pytest.mark.slow
    @pytest.mark.parametrize("spec", CHI_SQUARE_DISTS)
    def test_small_sizes_every_law(self, spec):
        """Sizes 3, 4 and 5 under every law pass at 10^5 draws; a lone tree is always drawn."""
        dist = make_offspring(spec)
        gen = np.random.default_rng(5)
        for n in (3, 4, 5):
            if (n - 1) % span(dist):
                continue
            trees = [t for t in enumerate_ordered_trees(n) if tree_weight(t, dist) > 0]
            if len(trees) == 1:
                assert all(sample_conditioned(dist, n, gen) == trees[0] for _ in range(1000))
                continue
            assert _chi_square_pvalue(spec, n, 100_000, 7 + n) > 1e-3


class TestSampleUnconditioned:
    """Tests for the unconditioned sampler."""

    def test_single_node_probability(self, geometric, rng):
        """P(|T| = 1) = p_0 = 1/2 for Ge(1/2)."""
        draws = [sample_unconditioned(geometric, rng, size_cap=10_000) for _ in range(4000)]
        singles = sum(1 for t in draws if t == SINGLE)
        assert abs(singles / 4000 - 0.5) < 4 * (0.25 / 4000) ** 0.5

    def test_size_three_probability(self, geometric, rng):
        """P(|T| = 3) = 1/16 for Ge(1/2)."""
        draws = 16_000
        hits = 0
        for _ in range(draws):
            tree = sample_unconditioned(geometric, rng, size_cap=10_000)
            hits += isinstance(tree, OrderedTree) and tree.size == 3
        p = 1 / 16
        assert abs(hits / draws - p) < 4 * (p * (1 - p) / draws) ** 0.5

    def test_cap_exceeded(self, poisson):
        """Trees outgrowing the cap are reported, never clipped."""
        gen = np.random.default_rng(3)
        outcomes = [sample_unconditioned(poisson, gen, size_cap=5) for _ in range(500)]
        capped = [o for o in outcomes if isinstance(o, CapExceeded)]
        assert capped
        assert all(o.size_cap == 5 and o.reached > 5 for o in capped)
        assert all(o.size <= 5 for o in outcomes if isinstance(o, OrderedTree))

    def test_invalid_cap(self, poisson, rng):
        """The cap must allow at least the root."""
        with pytest.raises(ValueError):
            sample_unconditioned(poisson, rng, size_cap=0)
