"""Godsil-McKay switching: partition validation, the switch itself, and the
explicit switching sets for J_S(n, k) with S = {0, ..., m}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .combin import KSubset, binom, colex_bits, interval
from .graph import (
    Graph,
    JohnsonOracle,
    JohnsonSpec,
    bits_of,
    build_johnson,
)

AnyGraph = Union[Graph, JohnsonOracle]

MEMBER, ZERO, HALF, FULL, VIOLATION = -1, 0, 1, 2, 3
CLASS_NAMES = {MEMBER: "member", ZERO: "zero", HALF: "half", FULL: "full", VIOLATION: "violation"}


class PartitionError(ValueError):
    pass


class ParameterError(ValueError):
    """Family parameters outside the range where the construction is proved."""


@dataclass(frozen=True)
class SwitchingPartition:
    """Blocks C_1..C_t; every vertex outside all blocks belongs to D."""

    blocks: tuple[tuple[int, ...], ...]

    def __init__(self, blocks: Iterable[Iterable[int]]) -> None:
        bl = tuple(tuple(sorted(int(u) for u in b)) for b in blocks)
        if not bl:
            raise PartitionError("a partition needs at least one block")
        seen: set[int] = set()
        for i, b in enumerate(bl):
            if not b:
                raise PartitionError(f"block {i} is empty")
            if len(set(b)) != len(b):
                raise PartitionError(f"block {i} repeats a vertex")
            overlap = seen.intersection(b)
            if overlap:
                raise PartitionError(f"block {i} overlaps earlier blocks at {sorted(overlap)}")
            seen.update(b)
        object.__setattr__(self, "blocks", bl)

    @property
    def t(self) -> int:
        return len(self.blocks)

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(bits_of(b) for b in self.blocks)

    def covered(self) -> set[int]:
        return {u for b in self.blocks for u in b}

    def to_json(self) -> dict:
        return {"blocks": [list(b) for b in self.blocks]}


@dataclass
class ValidationReport:
    valid: bool
    nontrivial: bool
    block_sizes: list[int]
    counts: np.ndarray  # (t, V): neighbours of each vertex inside each block
    classes: np.ndarray  # (t, V): MEMBER / ZERO / HALF / FULL / VIOLATION per block
    violations: list[dict] = field(default_factory=list)

    def half_vertices(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.classes[i] == HALF)

    def tally(self) -> list[dict[str, int]]:
        out = []
        for row in self.classes:
            vals, cnt = np.unique(row, return_counts=True)
            out.append({CLASS_NAMES[int(v)]: int(c) for v, c in zip(vals, cnt)})
        return out

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "nontrivial": self.nontrivial,
            "block_sizes": self.block_sizes,
            "class_tally": self.tally(),
            "violations": self.violations,
        }


def validate_partition(g: AnyGraph, p: SwitchingPartition) -> ValidationReport:
    """Check both Godsil-McKay conditions and classify every outside vertex.

    All violations are collected, not just the first one.
    """
    for b in p.blocks:
        if b[0] < 0 or b[-1] >= g.v:
            raise PartitionError(f"block {list(b)} has vertices outside 0..{g.v - 1}")
    t = p.t
    sizes = [len(b) for b in p.blocks]
    counts = np.stack([g.block_counts(b) for b in p.blocks])
    in_block = np.full(g.v, -1, dtype=np.int64)
    for i, b in enumerate(p.blocks):
        in_block[list(b)] = i
    violations: list[dict] = []

    for i, bi in enumerate(p.blocks):
        for j in range(t):
            vals = counts[j, list(bi)]
            if vals.min() != vals.max():
                violations.append(
                    {
                        "condition": 1,
                        "block": i,
                        "target_block": j,
                        "counts": sorted(set(int(x) for x in vals)),
                    }
                )

    classes = np.empty((t, g.v), dtype=np.int64)
    outside = in_block < 0
    for i, size in enumerate(sizes):
        c = counts[i]
        cls = np.full(g.v, VIOLATION, dtype=np.int64)
        cls[c == 0] = ZERO
        cls[c == size] = FULL
        if size % 2 == 0:
            cls[c == size // 2] = HALF
        cls[~outside] = MEMBER
        # members of other blocks are not constrained by condition 2
        other = (in_block >= 0) & (in_block != i)
        cls[other & (cls == VIOLATION)] = MEMBER
        classes[i] = cls
        bad = np.flatnonzero(outside & (cls == VIOLATION))
        for u in bad:
            violations.append(
                {"condition": 2, "block": i, "vertex": int(u), "count": int(c[u]), "size": size}
            )

    nontrivial = bool((classes[:, outside] == HALF).any()) if outside.any() else False
    return ValidationReport(
        valid=not violations,
        nontrivial=nontrivial,
        block_sizes=sizes,
        counts=counts,
        classes=classes,
        violations=violations,
    )


def apply_switch(
    g: Graph, p: SwitchingPartition, report: ValidationReport | None = None
) -> Graph:
    """For each block C_i, every D-vertex with exactly |C_i|/2 neighbours in C_i
    trades them for the other |C_i|/2. Edges between blocks are unchanged; for a
    valid partition this agrees with the similarity Q A Q of the switching matrix.
    """
    report = validate_partition(g, p) if report is None else report
    if not report.valid:
        raise PartitionError(f"cannot switch on an invalid partition ({len(report.violations)} violations)")
    rows = list(g.rows)
    for i, mask in enumerate(p.masks):
        for u in report.half_vertices(i):
            u = int(u)
            rows[u] ^= mask
            ubit = 1 << u
            for c in p.blocks[i]:
                rows[c] ^= ubit
    return g.with_rows(rows)


# ---------------------------------------------------------------------------
# explicit families


@dataclass
class FamilyInstance:
    family: str
    params: dict[str, int]
    spec: JohnsonSpec
    block_subsets: list[list[KSubset]]
    witnesses: dict[str, KSubset]

    def partition(self) -> SwitchingPartition:
        return SwitchingPartition([[self.spec.index(s) for s in b] for b in self.block_subsets])

    def witness_index(self, name: str) -> int:
        return self.spec.index(self.witnesses[name])

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "spec": self.spec.to_json(),
            "partition": self.partition().to_json(),
            "blocks_as_subsets": [[s.elements() for s in b] for b in self.block_subsets],
            "witnesses": {k: v.elements() for k, v in self.witnesses.items()},
            "witness_indices": {k: self.witness_index(k) for k in self.witnesses},
        }


def family_A(m: int, n: int, unchecked: bool = False) -> FamilyInstance:
    """J_{0..m}(n, 2m+1) with C = the (2m+1)-subsets of [2m+2]."""
    if not unchecked and (m < 2 or n < 4 * m + 2):
        raise ParameterError(f"family A needs m >= 2 and n >= 4m+2, got m={m}, n={n}")
    k = 2 * m + 1
    if n < max(2 * m + 2, k + 1) or m < 0:
        raise ParameterError(f"family A undefined for m={m}, n={n}")
    spec = JohnsonSpec(n, k, range(m + 1))
    full = (1 << (2 * m + 2)) - 1
    block = [KSubset(full ^ (1 << i), n) for i in range(2 * m + 2)]
    block.sort(key=spec.index)
    witnesses = {"c0": interval(n, 1, 2 * m + 1)}
    if n >= 4 * m + 2:
        witnesses["v"] = interval(n, 2 * m + 2, 4 * m + 2)
    return FamilyInstance("A", {"m": m, "n": n}, spec, [block], witnesses)


def family_B(m: int, k: int, unchecked: bool = False) -> FamilyInstance:
    """J_{0..m}(3k-2m-1, k) with C = the k-subsets containing [k-1]."""
    if not unchecked and (m < 0 or k < max(m + 2, 3)):
        raise ParameterError(f"family B needs m >= 0 and k >= max(m+2, 3), got m={m}, k={k}")
    if m < 0 or k < m + 2 or k < 2:
        raise ParameterError(f"family B undefined for m={m}, k={k}")
    n = 3 * k - 2 * m - 1
    spec = JohnsonSpec(n, k, range(m + 1))
    core = interval(n, 1, k - 1).bits
    block = [KSubset(core | 1 << (r - 1), n) for r in range(k, n + 1)]
    witnesses = {
        "c0": interval(n, 1, k),
        "c1": KSubset(core | 1 << k, n),
        "w": KSubset(interval(n, 1, k - 2).bits | 1 << (k - 1) | 1 << k, n),
    }
    return FamilyInstance("B", {"m": m, "k": k, "n": n}, spec, [block], witnesses)


def johnson_multiblock(n: int, k: int) -> tuple[JohnsonSpec, list[list[KSubset]]]:
    """Multi-block partition of J(n, k) built around Y = {1, 2, 3, 4}.

    One block per (k-3)-subset I of [n] minus Y: the four k-sets I plus
    three elements of Y. Everything else is D.
    """
    if not 3 <= k <= n - 3:
        raise ParameterError(f"need 3 <= k <= n-3, got n={n}, k={k}")
    spec = JohnsonSpec(n, k, [k - 1])
    y = 0b1111
    triples = [y ^ (1 << i) for i in range(4)]
    blocks = []
    for rest in colex_bits(n - 4, k - 3):
        shifted = rest << 4
        blocks.append([KSubset(shifted | tri, n) for tri in triples])
    return spec, blocks


@dataclass
class CounterexampleReport:
    m: int
    k: int
    n: int
    spec: JohnsonSpec
    num_blocks: int
    block_size: int
    witness: KSubset | None
    witness_count: int | None
    allowed_counts: tuple[int, int, int]
    witness_in_other_block: bool
    failure: bool
    partition_valid: bool | None
    num_violations: int | None

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "n": self.n,
            "spec": self.spec.to_json(),
            "num_blocks": self.num_blocks,
            "block_size": self.block_size,
            "witness": self.witness.elements() if self.witness else None,
            "witness_count_in_C1": self.witness_count,
            "allowed_counts": list(self.allowed_counts),
            "witness_in_other_block": self.witness_in_other_block,
            "failure": self.failure,
            "partition_valid": self.partition_valid,
            "num_violations": self.num_violations,
        }


def generalization_blocks(m: int, k: int, n: int) -> list[list[KSubset]]:
    """For every (k-1)-subset I of the head [n - 2(k-m)], the 2(k-m) sets I + {r}
    with r in the tail [n] minus the head."""
    head = n - 2 * (k - m)
    if head < k - 1:
        raise ParameterError(f"n={n} too small: head [{head}] has no (k-1)-subsets")
    blocks = []
    for core in colex_bits(head, k - 1):
        blocks.append([KSubset(core | 1 << (r - 1), n) for r in range(head + 1, n + 1)])
    return blocks


def multiblock_generalization_check(
    m: int, k: int, n: int | None = None, validate_budget: int = 5000
) -> CounterexampleReport:
    """Test the multi-block extension of family B away from n = 3k-2m-1.

    The witness contains [m], the element k, and k-m-1 tail elements. When k
    lies in the head, it meets k-m+1 sets of C_1 in at most m elements, which
    is neither 0, half nor all of the block, so it cannot sit in D; it can only
    sit in another block when m = k-2. The default n = 3k-2m is the first
    size past the proved case.
    """
    if not 0 <= m <= k - 2:
        raise ParameterError(f"need 0 <= m <= k-2, got m={m}, k={k}")
    n = 3 * k - 2 * m if n is None else n
    spec = JohnsonSpec(n, k, range(m + 1))
    blocks = generalization_blocks(m, k, n)
    size = 2 * (k - m)
    head = n - size
    tail = list(range(head + 1, n + 1))
    extra = [r for r in tail if r != k][: k - m - 1]
    witness = None
    count = None
    in_other = False
    if len(extra) == k - m - 1:
        witness = KSubset.of(n, list(range(1, m + 1)) + [k] + extra)
        if witness.k != k:
            witness = None
    if witness is not None:
        count = sum(1 for c in blocks[0] if (c.bits & witness.bits).bit_count() <= m)
        in_other = any(witness in b for b in blocks[1:])
        in_first = witness in blocks[0]
    allowed = (0, size // 2, size)
    failure = (
        witness is not None and not in_first and not in_other and count not in allowed
    )
    valid = None
    nviol = None
    if spec.num_vertices <= validate_budget:
        g = build_johnson(spec)
        rep = validate_partition(g, SwitchingPartition([[spec.index(s) for s in b] for b in blocks]))
        valid = rep.valid
        nviol = len(rep.violations)
    return CounterexampleReport(
        m, k, n, spec, len(blocks), size, witness, count, allowed, in_other, failure, valid, nviol
    )


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class K2PrefixCounts:
    """Neighbour counts in C = {c : [k-2] in c} for u meeting [k-2] in m-1 or m elements."""

    case_iii: int | None
    case_iv: int
    size: int

    def to_json(self) -> dict:
        return {"case_iii": self.case_iii, "case_iv": self.case_iv, "size": self.size}


def k2prefix_counts(n: int, k: int, m: int) -> K2PrefixCounts:
    if not 0 <= m <= k - 2:
        raise ParameterError(f"need 0 <= m <= k-2, got m={m}, k={k}")
    size = binom(n - k + 2, 2)
    case_iv = size - (n - 2 * k + m + 2) * (k - m) - binom(k - m, 2)
    case_iii = None if m == 0 else size - binom(k - m + 1, 2)
    return K2PrefixCounts(case_iii, case_iv, size)


def k2prefix_predicate(k: int) -> int | None:
    """n with 2n = 6k - 3 + sqrt(8k^2 + 1) when that is an integer, else None."""
    if k < 2:
        raise ParameterError(f"need k >= 2, got {k}")
    d = 8 * k * k + 1
    r = math.isqrt(d)
    if r * r != d or (6 * k - 3 + r) % 2:
        return None
    return (6 * k - 3 + r) // 2


def k2prefix_block(spec: JohnsonSpec) -> list[KSubset]:
    core = interval(spec.n, 1, spec.k - 2).bits
    tail = spec.n - spec.k + 2
    return [KSubset(core | pair << (spec.k - 2), spec.n) for pair in colex_bits(tail, 2)]


@dataclass(frozen=True)
class LambdaPrediction:
    lost: int
    gained: int

    @property
    def delta(self) -> int:
        return self.gained - self.lost

    def to_json(self) -> dict:
        return {"lost": self.lost, "gained": self.gained, "delta": self.delta}


def predict_lambda_A(m: int, n: int) -> LambdaPrediction:
    """Common neighbours of c0 = [2m+1] and v = {2m+2..4m+2} lost and gained by the switch."""
    if m < 2 or n < 4 * m + 2:
        raise ParameterError(f"family A needs m >= 2 and n >= 4m+2, got m={m}, n={n}")
    r = n - (4 * m + 2)
    lost = binom(2 * m + 1, m) * sum(binom(2 * m, i) * binom(r, m - i) for i in range(m))
    gained = binom(2 * m + 1, m + 1) * sum(binom(2 * m, i) * binom(r, m - i) for i in range(m + 1))
    return LambdaPrediction(lost, gained)


def predict_lambda_B(m: int, k: int) -> LambdaPrediction:
    """Common neighbours of c0 = [k] and w = [k-2]+{k,k+1} lost and gained by the switch."""
    if m < 0 or k < max(m + 2, 3):
        raise ParameterError(f"family B needs m >= 0 and k >= max(m+2, 3), got m={m}, k={k}")
    lost = binom(k - 2, m) * binom(2 * (k - m - 1), k - m) + binom(k - 2, m - 1) * binom(
        2 * k - 2 * m - 1, k - m
    )
    gained = binom(k - 2, m - 1) * binom(2 * (k - m - 1), k - m - 1)
    return LambdaPrediction(lost, gained)


def lambda_changes(g: Graph, h: Graph, x: int, y: int) -> LambdaPrediction:
    """Common neighbours of x and y present in g but not h (lost) and vice versa (gained)."""
    cg = g.rows[x] & g.rows[y]
    ch = h.rows[x] & h.rows[y]
    return LambdaPrediction((cg & ~ch).bit_count(), (ch & ~cg).bit_count())


def block_from_subsets(g: AnyGraph, subsets: Sequence[Sequence[int]]) -> list[int]:
    """Resolve 1-based subsets like [1, 2, 3, 4] to vertex indices of a Johnson graph."""
    n = g.spec.n
    return [g.index_of(KSubset.of(n, s)) for s in subsets]

