"""Exact counting of fixed-composition sequences and their asymptotics.

Counts are Python ints (arbitrary precision); only the final logarithms
are floats. The rank/unrank pair indexes the sequences of one type in
lexicographic order, with symbol order fixed by the alphabet.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .errors import CompositionMismatch, DomainError, RankOutOfRange
from .probability import Alphabet


@dataclass(frozen=True)
class TypeVector:
    """Occurrence counts of each alphabet symbol in a length-T sequence."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(self.counts)
        if not counts:
            raise DomainError("a type vector needs at least one symbol")
        if all(type(c) is int and c >= 0 for c in counts):
            object.__setattr__(self, "counts", counts)
            return
        for c in counts:
            if isinstance(c, bool) or int(c) != c or c < 0:
                raise DomainError(f"counts must be nonnegative integers, got {counts}")
        object.__setattr__(self, "counts", tuple(int(c) for c in counts))

    @property
    def T(self) -> int:
        return sum(self.counts)

    @property
    def n(self) -> int:
        return len(self.counts)

    @classmethod
    def of(cls, seq: Iterable, alphabet: Alphabet | Sequence[str]) -> "TypeVector":
        """Composition of ``seq`` over ``alphabet``."""
        index = _symbol_index(alphabet)
        return cls(tuple(_count(seq, index)))


def _as_type(t) -> TypeVector:
    return t if isinstance(t, TypeVector) else TypeVector(tuple(t))


def _symbol_index(alphabet) -> dict:
    symbols = alphabet.symbols if isinstance(alphabet, Alphabet) else tuple(alphabet)
    return {s: i for i, s in enumerate(symbols)}


def _count(seq, index: dict) -> list[int]:
    counts = [0] * len(index)
    for s in seq:
        try:
            counts[index[s]] += 1
        except KeyError:
            raise CompositionMismatch(f"symbol {s!r} is not in the alphabet") from None
    return counts


def multinomial_count(t) -> int:
    """K = T! / prod(c_i!) as the telescoping product of binomials.

    C(T, c_1) * C(T - c_1, c_2) * ... * C(c_n, c_n)
    """
    return _multinomial(_as_type(t).counts)


@lru_cache(maxsize=4096)
def _multinomial(counts: tuple[int, ...]) -> int:
    k, remaining = 1, sum(counts)
    for c in counts:
        k *= math.comb(remaining, c)
        remaining -= c
    return k


def log2_count(t) -> float:
    """log2 K, exact up to float rounding for any T (math.log2 accepts big ints)."""
    return math.log2(multinomial_count(t))


def stirling_log_factorial(m: int) -> float:
    """Natural log of sqrt(2 pi m) (m/e)^m."""
    if m < 1:
        raise DomainError(f"Stirling's formula needs m >= 1, got {m}")
    return 0.5 * math.log(2 * math.pi * m) + m * (math.log(m) - 1)


def stirling_factorial(m: int) -> float:
    """sqrt(2 pi m) (m/e)^m. Raises OverflowError past the float range (m > 170)."""
    return math.exp(stirling_log_factorial(m))


def stirling_binomial_log2(Ta: int, Tb: int) -> float:
    """log2 of the Stirling estimate of C(Ta, Tb).

    The estimate sqrt(a) a^(Ta) / (sqrt(2 pi T) sqrt(b(a-b)) b^(Tb) (a-b)^(T(a-b)))
    does not depend on how Ta, Tb are split into T times a ratio, so it is
    evaluated with T = 1. Nothing huge is formed; everything stays in logs.
    """
    if not 0 < Tb < Ta:
        raise DomainError(f"need 0 < Tb < Ta, got Ta={Ta}, Tb={Tb}")
    a, b = float(Ta), float(Tb)
    c = a - b
    log2 = math.log2
    return (
        0.5 * log2(a)
        + a * log2(a)
        - 0.5 * log2(2 * math.pi)
        - 0.5 * log2(b * c)
        - b * log2(b)
        - c * log2(c)
    )


def entropy_rate(t) -> float:
    """Bits per symbol needed to index one sequence of type ``t``: log2(K) / T."""
    t = _as_type(t)
    if t.T < 1:
        raise DomainError("entropy rate needs T >= 1")
    return log2_count(t) / t.T


def rank_sequence(seq: Sequence, t, alphabet) -> int:
    """Lexicographic rank of ``seq`` among all sequences of type ``t``."""
    t = _as_type(t)
    index = _symbol_index(alphabet)
    if len(index) != t.n:
        raise CompositionMismatch(f"alphabet has {len(index)} symbols, type has {t.n}")
    remaining = _count(seq, index)
    if tuple(remaining) != t.counts:
        raise CompositionMismatch(f"sequence has counts {tuple(remaining)}, declared {t.counts}")

    r = len(seq)
    perms = multinomial_count(t)  # arrangements of what is left
    rank = 0
    for s in seq:
        if perms == 1:
            break  # the rest is forced
        i = index[s]
        if i:
            # each smaller symbol u heads perms * remaining[u] / r arrangements
            rank += perms * sum(remaining[:i]) // r
        perms = perms * remaining[i] // r
        remaining[i] -= 1
        r -= 1
    return rank


def unrank_sequence(rank: int, t, alphabet) -> tuple:
    """Inverse of :func:`rank_sequence`; returns a tuple of alphabet symbols."""
    t = _as_type(t)
    symbols = alphabet.symbols if isinstance(alphabet, Alphabet) else tuple(alphabet)
    if len(symbols) != t.n:
        raise CompositionMismatch(f"alphabet has {len(symbols)} symbols, type has {t.n}")
    perms = multinomial_count(t)
    if not 0 <= rank < perms:
        raise RankOutOfRange(f"rank {rank} not in [0, {perms})")

    remaining = list(t.counts)
    out = []
    r = t.T
    while perms > 1:
        u = 0
        while True:
            c = remaining[u]
            if c:
                block = perms * c // r
                if rank < block:
                    break
                rank -= block
            u += 1
        out.append(symbols[u])
        perms = block
        remaining[u] -= 1
        r -= 1
    for u, c in enumerate(remaining):  # a single arrangement is left: sorted order
        out.extend([symbols[u]] * c)
    return tuple(out)


class BinomialLimitRow(NamedTuple):
    T: int
    central: float  # log2 C(T, T/2) / T
    total: float  # log2(sum_i C(T, i)) / T
    difference: float


def binomial_central_limit_table(T_values: Iterable[int]) -> list[BinomialLimitRow]:
    """Compare the central binomial coefficient with the full row sum on a log scale.

    Both columns tend to 1 bit per symbol; the gap closes roughly like
    log2(sqrt(pi T / 2)) / T.
    """
    rows = []
    for T in T_values:
        if isinstance(T, bool) or int(T) != T or T < 2 or T % 2:
            raise DomainError(f"T must be an even integer >= 2, got {T}")
        T = int(T)
        central = math.comb(T, T // 2)
        total, c = 0, 1
        for i in range(T + 1):  # walk the row with C(T, i+1) = C(T, i) (T - i) / (i + 1)
            total += c
            c = c * (T - i) // (i + 1)
        lc, lt = math.log2(central), math.log2(total)
        rows.append(BinomialLimitRow(T, lc / T, lt / T, (lt - lc) / T))
    return rows
