"""Johnson-scheme graphs J_S(n, k) and a small immutable graph type.

Adjacency rows are Python ints used as bitsets: bit ``v`` of ``rows[u]`` is
set iff ``uv`` is an edge. Vertex ``i`` of a Johnson graph is the k-subset of
colex rank ``i``, so vertex 0 is always {1, ..., k}.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .combin import KSubset, binom, colex_bits, rank_bits, unrank_bits

DEFAULT_VERTEX_BUDGET = 100_000


class BudgetExceeded(RuntimeError):
    """A size or work limit configured by the caller would be exceeded."""


@dataclass(frozen=True)
class JohnsonSpec:
    """Parameters of J_S(n, k): k-subsets of [n], adjacent iff |A & B| is in S."""

    n: int
    k: int
    S: tuple[int, ...]

    def __init__(self, n: int, k: int, S: Iterable[int]) -> None:
        s = tuple(sorted(set(int(x) for x in S)))
        if not 2 <= k <= n:
            raise ValueError(f"need 2 <= k <= n, got n={n}, k={k}")
        if n > 64:
            raise ValueError(f"n={n} exceeds the 64-element bitmask bound")
        if not s:
            raise ValueError("S must be nonempty")
        if s[0] < 0 or s[-1] > k - 1:
            raise ValueError(f"S={set(s)} must lie in {{0,...,{k - 1}}}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "S", s)

    @property
    def num_vertices(self) -> int:
        return binom(self.n, self.k)

    @property
    def degree(self) -> int:
        n, k = self.n, self.k
        return sum(binom(k, i) * binom(n - k, k - i) for i in self.S)

    def label(self, index: int) -> KSubset:
        return KSubset(unrank_bits(index, self.n, self.k), self.n)

    def index(self, subset: KSubset) -> int:
        if subset.n != self.n or subset.k != self.k:
            raise ValueError(f"{subset} is not a {self.k}-subset of [{self.n}]")
        return rank_bits(subset.bits)

    def __str__(self) -> str:
        return f"J_{{{','.join(map(str, self.S))}}}({self.n},{self.k})"

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "S": list(self.S)}


def parse_spec(text: str) -> JohnsonSpec:
    """Parse ``"n,k,{s1,s2,...}"`` (braces optional around a single value)."""
    text = text.strip()
    if "{" in text:
        head, _, rest = text.partition("{")
        body = rest.rstrip().rstrip("}")
        n, k = (int(x) for x in head.strip().rstrip(",").split(","))
        S = [int(x) for x in body.split(",") if x.strip()]
    else:
        parts = [int(x) for x in text.split(",")]
        if len(parts) < 3:
            raise ValueError(f"cannot parse spec {text!r}; expected n,k,{{S}}")
        n, k, S = parts[0], parts[1], parts[2:]
    return JohnsonSpec(n, k, S)


class Graph:
    """Undirected simple graph with bitset rows; treat instances as immutable."""

    __slots__ = ("v", "rows", "labels", "spec", "degrees", "__dict__")

    def __init__(
        self,
        rows: Sequence[int],
        labels: Sequence[KSubset] | None = None,
        spec: JohnsonSpec | None = None,
        check: bool = True,
    ) -> None:
        self.v = len(rows)
        self.rows = tuple(rows)
        self.labels = tuple(labels) if labels is not None else None
        self.spec = spec
        self.degrees = tuple(r.bit_count() for r in self.rows)
        if labels is not None and len(self.labels) != self.v:
            raise ValueError("one label per vertex required")
        if check:
            self._check()

    def _check(self) -> None:
        limit = 1 << self.v
        for u, row in enumerate(self.rows):
            if row >= limit or row < 0:
                raise ValueError(f"row {u} references a vertex >= {self.v}")
            if row >> u & 1:
                raise ValueError(f"self-loop at vertex {u}")
            r = row
            while r:
                low = r & -r
                w = low.bit_length() - 1
                if not self.rows[w] >> u & 1:
                    raise ValueError(f"asymmetric adjacency between {u} and {w}")
                r ^= low

    @classmethod
    def from_edges(cls, v: int, edges: Iterable[tuple[int, int]], **kw) -> Graph:
        rows = [0] * v
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            rows[a] |= 1 << b
            rows[b] |= 1 << a
        return cls(rows, **kw)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, **kw) -> Graph:
        a = np.asarray(matrix, dtype=bool)
        return cls([_bits_from_bool(row) for row in a], **kw)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        name = f" {self.spec}" if self.spec else ""
        return f"<Graph{name} v={self.v} e={self.num_edges}>"

    @property
    def num_edges(self) -> int:
        return sum(self.degrees) // 2

    def has_edge(self, u: int, w: int) -> bool:
        return bool(self.rows[u] >> w & 1)

    def neighbors(self, u: int) -> list[int]:
        return list(iter_bits(self.rows[u]))

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, row in enumerate(self.rows):
            for w in iter_bits(row >> (u + 1)):
                yield u, u + 1 + w

    def common_neighbors(self, x: int, y: int) -> int:
        return (self.rows[x] & self.rows[y]).bit_count()

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (int64, read-only)."""
        m = np.zeros((self.v, self.v), dtype=np.int64)
        if self.v:
            nbytes = (self.v + 7) // 8
            raw = np.frombuffer(
                b"".join(r.to_bytes(nbytes, "little") for r in self.rows), dtype=np.uint8
            ).reshape(self.v, nbytes)
            m[:] = np.unpackbits(raw, axis=1, bitorder="little")[:, : self.v]
        m.setflags(write=False)
        return m

    def block_counts(self, block: Sequence[int]) -> np.ndarray:
        """Number of neighbours each vertex has inside ``block``."""
        if not len(block):
            return np.zeros(self.v, dtype=np.int64)
        return self.matrix[:, list(block)].sum(axis=1)

    def label(self, u: int) -> KSubset:
        if self.labels is None:
            raise ValueError("graph carries no vertex labels")
        return self.labels[u]

    def index_of(self, subset: KSubset) -> int:
        if self.spec is not None:
            return self.spec.index(subset)
        if self.labels is None:
            raise ValueError("graph carries no vertex labels")
        return self.labels.index(subset)

    def induced(self, vertices: Sequence[int]) -> Graph:
        pos = {u: i for i, u in enumerate(vertices)}
        rows = []
        for u in vertices:
            r = 0
            for w in iter_bits(self.rows[u]):
                if w in pos:
                    r |= 1 << pos[w]
            rows.append(r)
        return Graph(rows, check=False)

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Graph with an edge (perm[u], perm[w]) for each edge (u, w)."""
        if sorted(perm) != list(range(self.v)):
            raise ValueError("perm must be a permutation of the vertices")
        rows = [0] * self.v
        for u, row in enumerate(self.rows):
            r = 0
            for w in iter_bits(row):
                r |= 1 << perm[w]
            rows[perm[u]] = r
        labels = None
        if self.labels is not None:
            labels = [None] * self.v
            for u, lab in enumerate(self.labels):
                labels[perm[u]] = lab
        return Graph(rows, labels=labels, check=False)

    def with_rows(self, rows: Sequence[int]) -> Graph:
        """Same vertex set and labels, new adjacency (used by switching)."""
        return Graph(rows, labels=self.labels, spec=None, check=False)


class JohnsonOracle:
    """J_S(n, k) with adjacency computed per query from subset labels.

    Used when C(n, k) is too large to materialise rows, e.g. K(25, 6) with
    177 100 vertices. Only the operations needed for partition validation
    are provided.
    """

    def __init__(self, spec: JohnsonSpec) -> None:
        self.spec = spec
        self.v = spec.num_vertices
        self.label_bits = np.fromiter(colex_bits(spec.n, spec.k), dtype=np.uint64, count=self.v)
        self.member = np.zeros(spec.k + 1, dtype=bool)
        self.member[list(spec.S)] = True

    def __repr__(self) -> str:
        return f"<JohnsonOracle {self.spec} v={self.v}>"

    def label(self, u: int) -> KSubset:
        return self.spec.label(u)

    def index_of(self, subset: KSubset) -> int:
        return self.spec.index(subset)

    def has_edge(self, u: int, w: int) -> bool:
        a, b = int(self.label_bits[u]), int(self.label_bits[w])
        return self.member[(a & b).bit_count()] and u != w

    def block_counts(self, block: Sequence[int], chunk: int = 4096) -> np.ndarray:
        block_bits = self.label_bits[list(block)]
        out = np.empty(self.v, dtype=np.int64)
        for start in range(0, self.v, chunk):
            part = self.label_bits[start : start + chunk]
            sizes = np.bitwise_count(part[:, None] & block_bits[None, :])
            out[start : start + chunk] = self.member[sizes].sum(axis=1)
        return out


def iter_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bits_of(vertices: Iterable[int]) -> int:
    m = 0
    for u in vertices:
        m |= 1 << u
    return m


def _bits_from_bool(row: np.ndarray) -> int:
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


def build_johnson(spec: JohnsonSpec, budget: int = DEFAULT_VERTEX_BUDGET) -> Graph:
    """Materialise J_S(n, k) with vertices in colex rank order."""
    v = spec.num_vertices
    if v > budget:
        raise BudgetExceeded(
            f"{spec} has {v} vertices, over the budget of {budget}; use JohnsonOracle"
        )
    label_bits = np.fromiter(colex_bits(spec.n, spec.k), dtype=np.uint64, count=v)
    member = np.zeros(spec.k + 1, dtype=bool)
    member[list(spec.S)] = True
    rows = []
    for a in label_bits:
        rows.append(_bits_from_bool(member[np.bitwise_count(label_bits & a)]))
    labels = [KSubset(int(b), spec.n) for b in label_bits]
    return Graph(rows, labels=labels, spec=spec, check=False)


def complement(g: Graph) -> Graph:
    full = (1 << g.v) - 1
    rows = [(~r & full) ^ (1 << u) for u, r in enumerate(g.rows)]
    spec = complement_spec(g.spec) if g.spec and len(g.spec.S) < g.spec.k else None
    return Graph(rows, labels=g.labels, spec=spec, check=False)


def complement_spec(spec: JohnsonSpec) -> JohnsonSpec:
    """J_{K minus S}(n, k) where K = {0, ..., k-1}."""
    rest = set(range(spec.k)) - set(spec.S)
    if not rest:
        raise ValueError(f"{spec} is complete; its complement has no edges to describe")
    return JohnsonSpec(spec.n, spec.k, rest)


def reflect(spec: JohnsonSpec) -> JohnsonSpec:
    """The isomorphic spec on (n-k)-subsets obtained by taking complements.

    A k-subset pair meeting in s elements maps to an (n-k)-subset pair meeting
    in s + n - 2k. Values of S below 2k - n name empty classes and are dropped.
    """
    n, k = spec.n, spec.k
    shift = n - 2 * k
    S = {s + shift for s in spec.S if s + shift >= 0}
    if n - k < 2:
        raise ValueError(f"reflection of {spec} has subset size {n - k} < 2")
    if not S:
        raise ValueError(f"{spec} has no edges; reflection undefined")
    return JohnsonSpec(n, n - k, S)


def triangle_count(g: Graph) -> int:
    total = 0
    for u, w in g.edges():
        total += (g.rows[u] & g.rows[w]).bit_count()
    return total // 3
