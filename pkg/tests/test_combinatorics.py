import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infocount.combinatorics import (
    TypeVector,
    binomial_central_limit_table,
    entropy_rate,
    log2_count,
    multinomial_count,
    rank_sequence,
    stirling_binomial_log2,
    stirling_factorial,
    stirling_log_factorial,
    unrank_sequence,
)
from infocount.entropy import entropy
from infocount.errors import CompositionMismatch, DomainError, RankOutOfRange

# 40-digit mpmath values
LOG2_C_1000_500 = 994.6909991192327
LOG2_252_OVER_10 = 0.7977279923499916


def _by_type(T, n, symbols="abc"):
    """All n^T sequences grouped by composition; product order is lexicographic."""
    groups = {}
    for seq in itertools.product(symbols[:n], repeat=T):
        groups.setdefault(tuple(seq.count(s) for s in symbols[:n]), []).append(seq)
    return groups


def _arrangements(counts, symbols="abc"):
    return _by_type(sum(counts), len(counts), symbols)[tuple(counts)]


def _compositions(T, n):
    for cut in itertools.combinations(range(T + n - 1), n - 1):
        parts, prev = [], -1
        for c in cut + (T + n - 1,):
            parts.append(c - prev - 1)
            prev = c
        yield tuple(parts)


class TestTypeVector:
    def test_total(self):
        assert TypeVector((2, 3)).T == 5

    @pytest.mark.parametrize("bad", [(), (-1, 2), (1.5, 2), (True, 1)])
    def test_invalid(self, bad):
        with pytest.raises(DomainError):
            TypeVector(bad)

    def test_of_sequence(self):
        assert TypeVector.of("abbab", "ab").counts == (2, 3)

    def test_of_unknown_symbol(self):
        with pytest.raises(CompositionMismatch):
            TypeVector.of("abz", "ab")


class TestMultinomialCount:
    def test_five_balls_two_boxes(self):
        assert multinomial_count((2, 3)) == 10

    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_single_arrangement(self, n):
        assert multinomial_count((7,) + (0,) * (n - 1)) == 1

    def test_central_thousand(self):
        k = multinomial_count((500, 500))
        assert k == math.comb(1000, 500)
        assert math.log2(k) == pytest.approx(LOG2_C_1000_500, abs=1e-9)

    def test_matches_enumeration(self):
        for T in range(0, 11):
            for n in (1, 2, 3):
                groups = _by_type(T, n)
                assert sorted(groups) == sorted(_compositions(T, n))
                for counts, seqs in groups.items():
                    assert multinomial_count(counts) == len(seqs), counts

    def test_telescoping_equals_factorial_ratio(self):
        r = random.Random(5)
        for _ in range(200):
            n = r.randint(1, 6)
            T = r.randint(0, 200)
            cuts = sorted(r.randint(0, T) for _ in range(n - 1))
            counts = [b - a for a, b in zip([0] + cuts, cuts + [T])]
            ratio = math.factorial(T)
            for c in counts:
                ratio //= math.factorial(c)
            assert multinomial_count(counts) == ratio


class TestLog2Count:
    def test_two_two(self):
        assert log2_count((2, 2)) == pytest.approx(math.log2(6), abs=1e-15)

    def test_four_sequences_need_two_bits(self):
        assert multinomial_count((1, 3)) == 4
        assert log2_count((1, 3)) == 2.0

    def test_tracks_entropy(self):
        bits = log2_count((900, 100))
        assert bits == pytest.approx(1000 * entropy([0.9, 0.1]).value, abs=5)
        assert bits == pytest.approx(469.0, abs=5)

    def test_huge_is_finite_and_accurate(self):
        k = multinomial_count((30_000, 20_000, 50_000))
        exact_bits = k.bit_length() - 1 + math.log2(k / (1 << (k.bit_length() - 1)))
        assert log2_count((30_000, 20_000, 50_000)) == pytest.approx(exact_bits, rel=1e-12)


class TestStirling:
    def test_m_one(self):
        assert stirling_factorial(1) == pytest.approx(math.sqrt(2 * math.pi) / math.e, rel=1e-15)
        assert stirling_factorial(1) == pytest.approx(0.9221, abs=1e-4)

    def test_m_ten(self):
        approx = stirling_factorial(10)
        assert approx == pytest.approx(3_598_695.6187, abs=1e-3)
        assert 1 - approx / math.factorial(10) == pytest.approx(0.0083, abs=1e-4)

    def test_m_hundred(self):
        rel = 1 - math.exp(stirling_log_factorial(100) - math.log(math.factorial(100)))
        assert 0 < rel < 1e-3

    def test_error_bound_up_to_thousand(self):
        prev = math.inf
        for m in range(1, 1001):
            rel = -math.expm1(stirling_log_factorial(m) - math.log(math.factorial(m)))
            assert 0 < rel < 1.1 / (12 * m)
            assert rel < prev
            prev = rel

    def test_domain(self):
        with pytest.raises(DomainError):
            stirling_factorial(0)

    def test_overflow_past_float_range(self):
        with pytest.raises(OverflowError):
            stirling_factorial(200)


class TestStirlingBinomial:
    def test_thousand_matches_exact(self):
        s = stirling_binomial_log2(1000, 500)
        assert s == pytest.approx(log2_count((500, 500)), abs=0.01)

    def test_ten_five(self):
        assert stirling_binomial_log2(10, 5) == pytest.approx(math.log2(252), rel=0.02)

    def test_four_two(self):
        s = stirling_binomial_log2(4, 2)
        assert math.isfinite(s) and s == pytest.approx(math.log2(6), abs=0.1)

    @pytest.mark.parametrize("Ta,Tb", [(10, 0), (10, 10), (5, 7)])
    def test_boundary(self, Ta, Tb):
        with pytest.raises(DomainError):
            stirling_binomial_log2(Ta, Tb)

    def test_error_shrinks(self):
        errs = [abs(stirling_binomial_log2(2 * k, k) - math.log2(math.comb(2 * k, k))) for k in (5, 50, 500)]
        assert errs[0] > errs[1] > errs[2]


class TestEntropyRate:
    def test_thousand(self):
        assert entropy_rate((500, 500)) == pytest.approx(LOG2_C_1000_500 / 1000, abs=1e-12)
        # gap to 1 bit is the square-root correction log2(sqrt(pi T / 2)) / T to first order
        assert 1 - entropy_rate((500, 500)) == pytest.approx(0.5 * math.log2(math.pi * 500) / 1000, abs=1e-5)

    def test_ten_thousand(self):
        assert entropy_rate((5000, 5000)) >= 0.9993

    def test_small(self):
        assert entropy_rate((2, 3)) == pytest.approx(math.log2(10) / 5, abs=1e-15)
        assert entropy_rate((2, 3)) == pytest.approx(0.6644, abs=1e-4)
        assert entropy([0.4, 0.6]).value == pytest.approx(0.9710, abs=1e-4)

    def test_convergence(self):
        h = entropy([0.3, 0.7]).value
        gaps = [abs(entropy_rate((3 * T // 10, 7 * T // 10)) - h) for T in (10, 100, 1000, 10_000)]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-3


class TestRankUnrank:
    def test_first_and_last(self):
        assert rank_sequence("aabbb", (2, 3), "ab") == 0
        assert rank_sequence("bbbaa", (2, 3), "ab") == 9
        assert "".join(unrank_sequence(0, (2, 3), "ab")) == "aabbb"
        assert "".join(unrank_sequence(9, (2, 3), "ab")) == "bbbaa"

    def test_all_ten(self):
        seqs = _arrangements((2, 3), "ab")
        assert [rank_sequence(s, (2, 3), "ab") for s in seqs] == list(range(10))

    def test_exhaustive_roundtrip(self):
        for T in range(0, 11):
            for n in (1, 2, 3):
                for counts, seqs in _by_type(T, n).items():
                    for r, s in enumerate(seqs):
                        assert rank_sequence(s, counts, "abc"[:n]) == r
                        assert unrank_sequence(r, counts, "abc"[:n]) == s

    def test_composition_mismatch(self):
        with pytest.raises(CompositionMismatch):
            rank_sequence("aabb", (2, 3), "ab")

    def test_rank_out_of_range(self):
        with pytest.raises(RankOutOfRange):
            unrank_sequence(10, (2, 3), "ab")
        with pytest.raises(RankOutOfRange):
            unrank_sequence(-1, (2, 3), "ab")

    def test_alphabet_order_defines_order(self):
        assert rank_sequence("aabbb", (3, 2), "ba") == 9

    def test_symbols_need_not_be_chars(self):
        seq = ["hi", "lo", "lo", "hi"]
        r = rank_sequence(seq, (2, 2), ["hi", "lo"])
        assert list(unrank_sequence(r, (2, 2), ["hi", "lo"])) == seq

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.sampled_from("abcd"), min_size=1, max_size=300))
    def test_roundtrip_long(self, seq):
        t = TypeVector.of(seq, "abcd")
        r = rank_sequence(seq, t, "abcd")
        assert 0 <= r < multinomial_count(t)
        assert list(unrank_sequence(r, t, "abcd")) == seq


class TestBinomialLimit:
    def test_ten(self):
        (row,) = binomial_central_limit_table([10])
        assert row.central == pytest.approx(LOG2_252_OVER_10, abs=1e-15)
        assert row.total == 1.0
        assert row.difference == pytest.approx(1 - LOG2_252_OVER_10, abs=1e-15)

    def test_large(self):
        rows = binomial_central_limit_table([10, 1000, 10_000])
        d = [r.difference for r in rows]
        assert all(x > 0 for x in d)
        assert d[0] > d[1] > d[2]
        assert d[1] < 0.006 and d[2] < 0.0008
        for r in rows:
            assert r.difference == pytest.approx(math.log2(math.sqrt(math.pi * r.T / 2)) / r.T, rel=0.05)

    @pytest.mark.parametrize("T", [0, 3, 11, -2])
    def test_odd_or_small(self, T):
        with pytest.raises(DomainError):
            binomial_central_limit_table([T])
