"""Sumset arithmetic, MSTD search, Stein iteration, Sidon sets, and the
entropy-gap amplification constructions."""

import math
from collections import Counter

import numpy as np
import pytest

from polarsum.distributions import (
    IntegerDistribution,
    entropy,
    entropy_diff_sum_minus_diff,
    exact_entropy_diff_uniform,
)
from polarsum.errors import BudgetError
from polarsum.sumsets import (
    IntSet,
    _positive_end,
    difference_set,
    dilate,
    find_target_diff,
    is_mstd,
    mstd_search,
    product_embed,
    sidon_set,
    sidon_stein_gap,
    stein_iterate,
    sumset,
)

CONWAY = IntSet((0, 2, 3, 4, 7, 11, 12, 14))
MARICA = IntSet((1, 2, 3, 5, 8, 9, 13, 15, 16))
Z12 = IntSet((0, 1, 2, 4, 5, 9), 12)


class TestIntSet:
    def test_of_sorts_deduplicates_and_reduces(self):
        assert IntSet.of([3, 1, 3, -2]).elements == (-2, 1, 3)
        assert IntSet.of([13, 1, 25], 12).elements == (1,)

    def test_rejects_unsorted_or_out_of_range(self):
        with pytest.raises(ValueError, match="increasing"):
            IntSet((2, 1))
        with pytest.raises(ValueError, match="increasing"):
            IntSet((1, 1))
        with pytest.raises(ValueError, match="lie in"):
            IntSet((0, 12), 12)
        with pytest.raises(ValueError, match="modulus"):
            IntSet((0,), 0)

    def test_container_protocol(self):
        s = IntSet((1, 4, 9))
        assert len(s) == 3 and 4 in s and 2 not in s
        assert list(s) == [1, 4, 9]
        assert s.diameter() == 8
        assert IntSet(()).diameter() == 0


class TestSumsetArithmetic:
    def test_conway_cardinalities(self):
        # the smallest set with more sums than differences: 26 vs 25
        assert len(sumset(CONWAY, CONWAY)) == 26
        assert len(difference_set(CONWAY, CONWAY)) == 25
        assert is_mstd(CONWAY)

    def test_marica_cardinalities(self):
        assert len(sumset(MARICA, MARICA)) == 30
        assert len(difference_set(MARICA, MARICA)) == 29
        assert is_mstd(MARICA)

    def test_cyclic_example_covers_sums_and_misses_one_difference(self):
        assert sumset(Z12, Z12).elements == tuple(range(12))
        missing = set(range(12)) - set(difference_set(Z12, Z12).elements)
        assert missing == {6}
        assert is_mstd(Z12)

    def test_integer_basics(self):
        a = IntSet((0, 1))
        assert sumset(a, a).elements == (0, 1, 2)
        assert difference_set(a, a).elements == (-1, 0, 1)

    def test_symmetric_set_has_equal_sum_and_difference_sets(self):
        s = IntSet((-1, 0, 1))
        assert sumset(s, s).elements == difference_set(s, s).elements
        assert not is_mstd(s)

    def test_dilate(self):
        assert dilate(IntSet((0, 1, 2)), 3).elements == (0, 3, 6)
        assert dilate(IntSet((0, 1, 2, 3, 4), 5), 2).elements == (0, 1, 2, 3, 4)
        assert dilate(IntSet((1, 2)), -1).elements == (-2, -1)

    def test_mismatched_groups_rejected(self):
        with pytest.raises(ValueError, match="mismatch"):
            sumset(IntSet((0, 1)), IntSet((0, 1), 5))


class TestMstdSearch:
    def test_smallest_cyclic_modulus_is_twelve(self):
        for m in range(1, 12):
            assert list(mstd_search(modulus=m)) == []
        found = list(mstd_search(modulus=12))
        assert len(found) == 24
        assert Z12 in found

    def test_canonical_cyclic_search_keeps_one_per_class(self):
        canonical = list(mstd_search(modulus=12, canonical=True))
        assert [s.elements for s in canonical] == [(0, 1, 2, 4, 5, 9)]

    def test_results_arrive_in_lexicographic_order(self):
        found = [s.elements for s in mstd_search(modulus=12)]
        assert found == sorted(found)

    def test_no_small_integer_mstd_set(self):
        assert list(mstd_search(width=14, max_size=7)) == []

    def test_conway_is_the_unique_small_canonical_class(self):
        found = list(mstd_search(width=14, max_size=8, canonical=True))
        assert [s.elements for s in found] == [CONWAY.elements]

    def test_noncanonical_width_search_sees_affine_copies(self):
        found = list(mstd_search(width=14, max_size=8))
        assert CONWAY in found
        reflection = IntSet(tuple(sorted(14 - e for e in CONWAY.elements)))
        assert reflection in found

    def test_budget_refusal(self):
        with pytest.raises(BudgetError, match="2\\^31"):
            next(mstd_search(modulus=31))
        with pytest.raises(BudgetError, match="2\\^31"):
            next(mstd_search(width=31))

    def test_exactly_one_of_modulus_or_width(self):
        with pytest.raises(ValueError, match="exactly one"):
            next(mstd_search())
        with pytest.raises(ValueError, match="exactly one"):
            next(mstd_search(modulus=5, width=5))


class TestSteinIteration:
    def test_two_element_base_first_level(self):
        trace = stein_iterate(IntSet((0, 1)), 1)
        level, multiplier = trace.levels[0]
        assert multiplier == 3
        assert level.elements == (0, 1, 3, 4)
        assert len(sumset(level, level)) == 9
        assert len(difference_set(level, level)) == 9

    def test_cardinalities_square_at_every_level(self):
        # sizes follow |A|^(2^j), so three levels on a pair reach 256
        trace = stein_iterate(IntSet((0, 1)), 3, budget=300)
        assert [len(s) for s, _ in trace.levels] == [4, 16, 256]
        assert [m for _, m in trace.levels][:2] == [3, 9]

    def test_conway_first_level(self):
        trace = stein_iterate(CONWAY, 1)
        level, multiplier = trace.levels[0]
        assert multiplier == 27
        assert len(level) == 64
        assert len(sumset(level, level)) == 26 * 26
        assert len(difference_set(level, level)) == 25 * 25

    def test_trace_recomputes(self):
        trace = stein_iterate(IntSet((0, 2, 3)), 2)
        current = trace.base
        for level, multiplier in trace.levels:
            expected = sumset(current, dilate(current, multiplier))
            assert level == expected
            current = level

    def test_random_bases_square_all_three_cardinalities(self):
        rng = np.random.default_rng(100)
        for _ in range(5):
            size = int(rng.integers(2, 6))
            elems = np.sort(rng.choice(25, size=size, replace=False))
            base = IntSet(tuple(int(e) for e in elems))
            trace = stein_iterate(base, 1)
            level, _ = trace.levels[0]
            assert len(level) == len(base) ** 2
            assert len(sumset(level, level)) == len(sumset(base, base)) ** 2
            assert len(difference_set(level, level)) == len(difference_set(base, base)) ** 2

    def test_singleton_is_trivial(self):
        trace = stein_iterate(IntSet((0,)), 2)
        assert [(s.elements, m) for s, m in trace.levels] == [((0,), 1), ((0,), 1)]

    def test_budget_refusal(self):
        with pytest.raises(BudgetError, match="4096"):
            stein_iterate(IntSet(tuple(range(8))), 4)
        with pytest.raises(BudgetError, match="4096"):
            stein_iterate(IntSet((0, 1)), 13)

    def test_domain_errors(self):
        with pytest.raises(ValueError, match="over Z"):
            stein_iterate(IntSet((0, 1), 7), 1)
        with pytest.raises(ValueError, match="k >= 1"):
            stein_iterate(IntSet((0, 1)), 0)
        with pytest.raises(ValueError, match="empty"):
            stein_iterate(IntSet(()), 1)


class TestSidonSets:
    def test_greedy_prefix(self):
        assert sidon_set(6).elements == (1, 2, 4, 8, 13, 21)

    @pytest.mark.parametrize("n", range(1, 13))
    def test_difference_count_is_maximal(self, n):
        a = sidon_set(n)
        assert len(difference_set(a, a)) == n * n - n + 1

    def test_pairwise_differences_distinct(self):
        elems = sidon_set(10).elements
        diffs = [b - a for i, a in enumerate(elems) for b in elems[i + 1:]]
        assert len(diffs) == len(set(diffs))

    def test_rejects_nonpositive_n(self):
        with pytest.raises(ValueError, match="n >= 1"):
            sidon_set(0)


class TestSidonSteinGap:
    def test_singleton_level_is_degenerate(self):
        dist, (lower, upper) = sidon_stein_gap(1)
        assert dist.support == (1,)
        assert (lower, upper) == (0.0, 0.0)

    @pytest.mark.parametrize("k,separated", [(2, False), (3, False), (4, True)])
    def test_bounds_certify_from_k_four(self, k, separated):
        dist, (lower, upper) = sidon_stein_gap(k)
        assert len(dist.support) == k**4
        assert (lower > upper) is separated
        # the bounds must sandwich the true entropies either way
        diff_entropy = entropy(
            _convolved(dist, -1)
        )
        sum_entropy = entropy(_convolved(dist, +1))
        assert diff_entropy >= lower - 1e-9
        assert sum_entropy <= upper + 1e-9
        # the true gap is already negative before the certificate closes
        assert sum_entropy < diff_entropy

    def test_rejects_nonpositive_k(self):
        with pytest.raises(ValueError, match="k >= 1"):
            sidon_stein_gap(0)


def _convolved(p, sign):
    from polarsum.distributions import convolve_integer

    return convolve_integer(p, p, sign)


class TestProductEmbed:
    def test_single_factor_is_identity(self):
        p = IntegerDistribution.uniform_on((0, 1, 3))
        assert product_embed(p, 1) == p

    @pytest.mark.parametrize("k", [2, 3])
    def test_exact_gap_scales_by_k(self, k):
        base = (0, 1, 3)
        p = IntegerDistribution.uniform_on(base)
        embedded = product_embed(p, k)
        assert len(embedded.support) == len(base) ** k
        gap_base = exact_entropy_diff_uniform(base)
        gap_embed = exact_entropy_diff_uniform(embedded.support)
        assert gap_embed.same_value(gap_base.scaled(k))

    def test_entropy_multiplies(self):
        p = IntegerDistribution((0, 1, 3), (0.5, 0.25, 0.25))
        embedded = product_embed(p, 3)
        assert entropy(embedded) == pytest.approx(3 * entropy(p), abs=1e-12)

    def test_float_gap_scales(self):
        p = IntegerDistribution((0, 1, 3), (0.5, 0.25, 0.25))
        embedded = product_embed(p, 2)
        assert entropy_diff_sum_minus_diff(embedded) == pytest.approx(
            2 * entropy_diff_sum_minus_diff(p), abs=1e-10
        )

    def test_wider_base_gives_the_same_gap(self):
        base = (0, 1, 3)
        p = IntegerDistribution.uniform_on(base)
        snug = product_embed(p, 2)
        wide = product_embed(p, 2, d=25)
        assert exact_entropy_diff_uniform(wide.support).same_value(
            exact_entropy_diff_uniform(snug.support)
        )

    def test_too_small_base_rejected_with_minimum(self):
        # pair sums of {0,1,3} span {0,...,6}, so digits need base >= 7
        p = IntegerDistribution.uniform_on((0, 1, 3))
        with pytest.raises(ValueError, match="minimal admissible base is 7"):
            product_embed(p, 2, d=5)

    def test_rejects_nonpositive_k(self):
        with pytest.raises(ValueError, match="k >= 1"):
            product_embed(IntegerDistribution.uniform_on((0, 1)), 0)


class TestFindTargetDiff:
    @pytest.mark.parametrize("target", [0.0, 0.05, -0.3])
    def test_hits_single_factor_targets(self, target):
        dist = find_target_diff(target)
        assert entropy_diff_sum_minus_diff(dist) == pytest.approx(target, abs=1e-6)

    def test_hits_amplified_target(self):
        dist = find_target_diff(-1.0)
        assert entropy_diff_sum_minus_diff(dist) == pytest.approx(-1.0, abs=1e-6)

    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValueError, match="tol"):
            find_target_diff(0.0, tol=0.0)

    def test_positive_endpoint_gap_matches_frozen_design(self):
        # The tuned positive endpoint must keep the amplification exponent
        # small: +0.05 with exponent 3 needs a per-factor gap above 0.05/3.
        end = _positive_end()
        gap = entropy_diff_sum_minus_diff(end)
        assert gap == pytest.approx(0.024594114, abs=1e-8)
        assert 0.98 * gap > 0.05 / 3

    def test_rejects_oversized_amplification(self):
        with pytest.raises(BudgetError, match="budget"):
            find_target_diff(-5.0)
