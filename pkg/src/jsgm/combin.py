"""Subsets of [n] as bitmasks, binomials, and colex rank/unrank.

Ground positions are 1-based at the API surface (``KSubset.of(1, 2, 3)``)
and stored 0-based in the bitmask: element ``i`` sets bit ``i - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

MAX_GROUND = 64


def binom(a: int, b: int) -> int:
    """C(a, b) with the convention C(a, b) = 0 for b < 0 or b > a."""
    if a < 0:
        raise ValueError(f"binom: upper index must be nonnegative, got {a}")
    if b < 0 or b > a:
        return 0
    return math.comb(a, b)


@lru_cache(maxsize=None)
def pascal(rows: int) -> tuple[tuple[int, ...], ...]:
    """Pascal triangle padded to a square: ``pascal(r)[a][b] == binom(a, b)``."""
    table = [[0] * (rows + 1) for _ in range(rows + 1)]
    for a in range(rows + 1):
        table[a][0] = 1
        for b in range(1, a + 1):
            table[a][b] = table[a - 1][b - 1] + table[a - 1][b]
    return tuple(tuple(row) for row in table)


@dataclass(frozen=True, order=True)
class KSubset:
    """A subset of [n] = {1, ..., n} stored as a bitmask."""

    bits: int
    n: int

    def __post_init__(self) -> None:
        if not 0 <= self.n <= MAX_GROUND:
            raise ValueError(f"ground set size {self.n} outside 0..{MAX_GROUND}")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bitmask {self.bits:#x} has bits above position {self.n}")

    @classmethod
    def of(cls, n: int, elements: Iterable[int]) -> KSubset:
        bits = 0
        for e in elements:
            if not 1 <= e <= n:
                raise ValueError(f"element {e} not in [1, {n}]")
            bits |= 1 << (e - 1)
        return cls(bits, n)

    @property
    def k(self) -> int:
        return self.bits.bit_count()

    def elements(self) -> list[int]:
        return [i + 1 for i in range(self.n) if self.bits >> i & 1]

    def __contains__(self, element: int) -> bool:
        return 1 <= element <= self.n and bool(self.bits >> (element - 1) & 1)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.elements())) + "}"


def interval(n: int, lo: int, hi: int) -> KSubset:
    """The subset {lo, ..., hi} of [n] (empty when hi < lo)."""
    return KSubset.of(n, range(lo, hi + 1))


def intersection_size(a: KSubset, b: KSubset) -> int:
    if a.n != b.n:
        raise ValueError(f"ground sets differ: n={a.n} vs n={b.n}")
    return (a.bits & b.bits).bit_count()


def rank_bits(bits: int, k: int | None = None) -> int:
    """Colex rank of a bitmask: sum of C(p_i, i) over set positions p_1 < p_2 < ..."""
    r = 0
    i = 1
    while bits:
        low = bits & -bits
        r += math.comb(low.bit_length() - 1, i)
        bits ^= low
        i += 1
    return r


def rank(s: KSubset) -> int:
    return rank_bits(s.bits)


def unrank_bits(index: int, n: int, k: int) -> int:
    total = binom(n, k)
    if not 0 <= index < total:
        raise IndexError(f"rank {index} out of range 0..{total - 1} for C({n},{k})")
    bits = 0
    pos = n - 1
    for i in range(k, 0, -1):
        while math.comb(pos, i) > index:
            pos -= 1
        bits |= 1 << pos
        index -= math.comb(pos, i)
        pos -= 1
    return bits


def unrank(index: int, n: int, k: int) -> KSubset:
    return KSubset(unrank_bits(index, n, k), n)


def colex_bits(n: int, k: int) -> Iterator[int]:
    """All k-subsets of an n-set as bitmasks, in colex (= rank) order.

    Uses Gosper's hack: the next larger integer with the same popcount.
    """
    if k == 0:
        yield 0
        return
    if k > n:
        return
    x = (1 << k) - 1
    limit = 1 << n
    while x < limit:
        yield x
        low = x & -x
        ripple = x + low
        x = (((ripple ^ x) >> 2) // low) | ripple


def all_subsets(n: int, k: int) -> list[KSubset]:
    return [KSubset(b, n) for b in colex_bits(n, k)]


def to_json(s: KSubset) -> list[int]:
    return s.elements()


def from_json(n: int, elements: Sequence[int]) -> KSubset:
    s = KSubset.of(n, elements)
    if s.k != len(elements):
        raise ValueError(f"repeated elements in {list(elements)}")
    return s
