import math

import numpy as np
import pytest

from gwpattern.core.errors import PreconditionError, ResourceError, SpanError
from gwpattern.core.settings import set_settings
from gwpattern.model.offspring import make_offspring
from gwpattern.model.random_walk import (
    IntegerPmf,
    local_limit_ratio,
    point_prob,
    tail_bound_report,
    walk_sum_pmf,
)


class TestWalkSumPmf:
    """Tests for the distribution of S_n."""

    def test_zero_summands(self, poisson):
        """S_0 is the point mass at 0."""
        pmf = walk_sum_pmf(poisson, 0)
        assert pmf.prob(0) == 1.0
        assert pmf.max_value == 0
        assert pmf.provenance == "point"

    def test_negative_n(self, poisson):
        """A negative number of summands is rejected."""
        with pytest.raises(ValueError):
            walk_sum_pmf(poisson, -1)

    def test_poisson_value(self, poisson):
        """P(S_5 = 4) for Po(1) is e^-5 5^4 / 4!."""
        assert walk_sum_pmf(poisson, 5).prob(4) == pytest.approx(0.1754674, abs=1e-7)

    def test_geometric_value(self, geometric):
        """P(S_3 = 2) for Ge(1/2) is 0.1875."""
        assert walk_sum_pmf(geometric, 3).prob(2) == pytest.approx(0.1875, abs=1e-14)

    def test_full_binary_parity(self, full_binary):
        """S_2 of the full binary law is never odd."""
        pmf = walk_sum_pmf(full_binary, 2)
        assert pmf.prob(1) == 0.0
        assert pmf.prob(2) == pytest.approx(0.5)

    def test_out_of_range_is_zero(self, binary):
        """Values outside the stored range have probability 0."""
        pmf = walk_sum_pmf(binary, 3)
        assert pmf.prob(-1) == 0.0
        assert pmf.prob(7) == 0.0

    @pytest.mark.parametrize("spec", ["poisson:1", "geometric:0.5", "binomial:2:0.5"])
    @pytest.mark.parametrize("n", [1, 2, 7, 33, 64])
    def test_closed_form_matches_convolution(self, spec, n):
        """The closed-form path agrees with generic convolution."""
        dist = make_offspring(spec)
        fast = walk_sum_pmf(dist, n)
        slow = walk_sum_pmf(dist, n, closed_form=False)
        assert fast.provenance == "closed_form"
        assert slow.provenance == "convolution"
        top = min(fast.max_value, slow.max_value)
        for k in range(top + 1):
            assert fast.prob(k) == pytest.approx(slow.prob(k), abs=1e-10)

    @pytest.mark.parametrize("a", [1, 3, 8])
    @pytest.mark.parametrize("b", [2, 5])
    def test_convolution_law(self, binary, a, b):
        """S_{a+b} is S_a convolved with S_b."""
        left = walk_sum_pmf(binary, a, closed_form=False)
        right = walk_sum_pmf(binary, b, closed_form=False)
        both = walk_sum_pmf(binary, a + b, closed_form=False)
        expected = np.convolve(left.mass, right.mass)
        np.testing.assert_allclose(both.mass, expected[: len(both.mass)], atol=1e-14)

    @pytest.mark.parametrize("spec", ["poisson:1", "poisson:1:12", "geometric:0.5", "mary:3"])
    def test_mass_accounting(self, spec):
        """Stored mass plus declared deficiency is 1."""
        pmf = walk_sum_pmf(make_offspring(spec), 40)
        assert pmf.total() + pmf.deficiency == pytest.approx(1.0, abs=1e-12)

    def test_cap_keeps_leading_entries(self, poisson12):
        """Capped results agree with the full vector below the cap."""
        full = walk_sum_pmf(poisson12, 30)
        capped = walk_sum_pmf(poisson12, 30, cap=25)
        assert capped.upper == 25
        assert capped.max_value == 25
        for k in range(26):
            assert capped.prob(k) == pytest.approx(full.prob(k), rel=1e-12, abs=1e-300)

    def test_fft_path(self, poisson12):
        """Long vectors switch to FFT and still agree with the direct path."""
        direct = walk_sum_pmf(poisson12, 600)
        set_settings(numerics_fft_threshold=64)
        fft = walk_sum_pmf(poisson12, 600)
        assert fft.provenance == "fft"
        assert direct.provenance == "convolution"
        assert fft.prob(599) == pytest.approx(direct.prob(599), rel=1e-9)

    def test_support_cap(self, binary):
        """Allocations beyond max_support raise ResourceError."""
        set_settings(numerics_max_support=10)
        with pytest.raises(ResourceError):
            walk_sum_pmf(binary, 100)

    def test_pmf_entries_nonnegative(self):
        """IntegerPmf refuses negative mass."""
        with pytest.raises(ValueError):
            IntegerPmf(0, np.array([0.5, -0.1]))


class TestPointProb:
    """Tests for single point probabilities."""

    def test_off_lattice(self, full_binary):
        """Odd values under span 2 are 0 without computing anything."""
        assert point_prob(full_binary, 10, 9) == 0.0

    def test_beyond_support(self, binary):
        """k above n * max_degree is 0."""
        assert point_prob(binary, 3, 7) == 0.0

    def test_negative(self, poisson):
        """Negative k is 0."""
        assert point_prob(poisson, 3, -1) == 0.0

    def test_matches_walk(self, poisson12):
        """point_prob agrees with the dense walk."""
        assert point_prob(poisson12, 20, 19) == pytest.approx(walk_sum_pmf(poisson12, 20).prob(19), rel=1e-12)


class TestTailBounds:
    """Tests for the scaled point-probability suprema."""

    def test_rows_per_n(self, binary):
        """One row per distinct n, in increasing order."""
        report = tail_bound_report(binary, [50, 10, 10, 100])
        assert [row.n for row in report.rows] == [10, 50, 100]

    def test_suprema_are_finite_and_stable(self, poisson):
        """The suprema settle on a growing grid."""
        report = tail_bound_report(poisson, [25, 50, 100, 200, 400])
        small = report.suprema(100)
        full = report.suprema()
        assert all(math.isfinite(x) and x > 0 for x in full)
        for a, b in zip(small, full, strict=True):
            assert b <= a * 1.05

    def test_sqrt_n_bound_near_llt(self, poisson):
        """sqrt(n) P(S_n = n - m) peaks near 1 / sqrt(2 pi sigma^2)."""
        report = tail_bound_report(poisson, [400])
        assert report.sup_sqrt_n_p == pytest.approx(1 / math.sqrt(2 * math.pi), rel=0.02)

    def test_m_range(self, binary):
        """An explicit m window restricts the scan."""
        report = tail_bound_report(binary, [20], m_range=(0, 2))
        row = report.rows[0]
        assert 0 <= row.argmax_sqrt_n_p <= 2

    def test_infinite_variance(self):
        """Heavy tails have no finite second moment."""
        with pytest.raises(PreconditionError):
            tail_bound_report(make_offspring("heavytail:1:0.5:100"), [10])


class TestLocalLimit:
    """Tests for the local limit ratio."""

    @pytest.mark.parametrize("spec", ["poisson:1", "geometric:0.5", "binomial:2:0.5"])
    def test_ratio_tends_to_one(self, spec):
        """The ratio is within 2% of 1 at n = 2000."""
        assert local_limit_ratio(make_offspring(spec), 2001) == pytest.approx(1.0, abs=0.02)

    def test_span_two(self, full_binary):
        """Span 2 laws are scaled by h."""
        assert local_limit_ratio(full_binary, 2001) == pytest.approx(1.0, abs=0.02)

    def test_span_violation(self, full_binary):
        """n - 1 off the lattice raises SpanError."""
        with pytest.raises(SpanError):
            local_limit_ratio(full_binary, 2000)
