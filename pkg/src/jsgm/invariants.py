"""Isomorphism invariants built on common-neighbour counts, and an exact
isomorphism test by colour refinement plus individualisation.

A non-isomorphism verdict from :func:`noniso_certificate` is a proof; an
INCONCLUSIVE verdict says nothing. :func:`exact_iso` decides the question
outright within a node budget and verifies any mapping it returns.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, triangle_count

ISO_VERTEX_BUDGET = 512
ISO_NODE_BUDGET = 20_000


def lambda_matrix(g: Graph) -> np.ndarray:
    """lambda(x, y) for all pairs; the diagonal holds the degrees."""
    a = g.matrix.astype(np.float64)
    return np.rint(a @ a).astype(np.int64)


@dataclass(frozen=True)
class PatternCensus:
    patterns: tuple[tuple[int, ...], ...]  # per vertex: sorted lambda(x, y), y != x
    census: tuple[tuple[int, ...], ...]  # the same multiset, sorted
    digest: str

    def distinct(self) -> int:
        return len(set(self.census))

    def to_json(self) -> dict:
        counts: dict[tuple[int, ...], int] = {}
        for pat in self.census:
            counts[pat] = counts.get(pat, 0) + 1
        return {
            "digest": self.digest,
            "distinct_patterns": len(counts),
            "classes": [
                {"multiplicity": c, "pattern": _compress(pat)} for pat, c in sorted(counts.items())
            ],
        }


def _compress(pattern: tuple[int, ...]) -> list[list[int]]:
    vals, cnt = np.unique(np.asarray(pattern), return_counts=True)
    return [[int(v), int(c)] for v, c in zip(vals, cnt)]


def pattern_census(g: Graph) -> PatternCensus:
    lam = lambda_matrix(g)
    if g.v:
        off = lam[~np.eye(g.v, dtype=bool)].reshape(g.v, g.v - 1)
    else:
        off = lam.reshape(0, 0)
    rows = np.sort(off, axis=1)
    patterns = tuple(tuple(int(x) for x in r) for r in rows)
    census = tuple(sorted(patterns))
    h = hashlib.blake2b(digest_size=8)
    h.update(np.asarray(census, dtype=np.int64).tobytes())
    h.update(g.v.to_bytes(8, "little"))
    return PatternCensus(patterns, census, h.hexdigest())


def local_census(g: Graph) -> tuple[str, ...]:
    """Per-vertex digest of the pattern census of the subgraph induced on N(x).

    Counts common neighbours inside a neighbourhood, i.e. a triple statistic.
    It separates switched graphs that pair statistics (lambda patterns, even
    two-dimensional Weisfeiler-Leman) leave identical.
    """
    return tuple(pattern_census(g.induced(g.neighbors(x))).digest for x in range(g.v))


class NonIso(str, enum.Enum):
    DISTINGUISHED = "DISTINGUISHED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class NonIsoVerdict:
    verdict: NonIso
    invariant: str | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "invariant": self.invariant, "detail": self.detail}


def noniso_certificate(g: Graph, h: Graph) -> NonIsoVerdict:
    """Compare vertex count, degree sequence, triangles, pattern census, then
    the census of neighbourhood subgraphs; the first difference is reported."""
    if g.v != h.v:
        return NonIsoVerdict(NonIso.DISTINGUISHED, "vertex_count", {"g": g.v, "h": h.v})
    dg, dh = sorted(g.degrees), sorted(h.degrees)
    if dg != dh:
        return NonIsoVerdict(NonIso.DISTINGUISHED, "degree_sequence", {})
    tg, th = triangle_count(g), triangle_count(h)
    if tg != th:
        return NonIsoVerdict(NonIso.DISTINGUISHED, "triangle_count", {"g": tg, "h": th})
    cg, ch = pattern_census(g), pattern_census(h)
    if cg.census != ch.census:
        only_g = sorted(set(cg.census) - set(ch.census))
        only_h = sorted(set(ch.census) - set(cg.census))
        return NonIsoVerdict(
            NonIso.DISTINGUISHED,
            "pattern_census",
            {
                "g_digest": cg.digest,
                "h_digest": ch.digest,
                "g_distinct": cg.distinct(),
                "h_distinct": ch.distinct(),
                "example_only_in_g": _compress(only_g[0]) if only_g else None,
                "example_only_in_h": _compress(only_h[0]) if only_h else None,
            },
        )
    lg, lh = sorted(local_census(g)), sorted(local_census(h))
    if lg != lh:
        return NonIsoVerdict(
            NonIso.DISTINGUISHED,
            "local_census",
            {"g_distinct": len(set(lg)), "h_distinct": len(set(lh))},
        )
    return NonIsoVerdict(NonIso.INCONCLUSIVE, None, {"census_digest": cg.digest})


# ---------------------------------------------------------------------------
# exact isomorphism


class Iso(str, enum.Enum):
    ISOMORPHIC = "ISOMORPHIC"
    NOT_ISOMORPHIC = "NOT_ISOMORPHIC"
    UNDECIDED_BUDGET = "UNDECIDED_BUDGET"


@dataclass
class IsoResult:
    status: Iso
    mapping: list[int] | None = None
    nodes: int = 0

    def to_json(self) -> dict:
        return {"status": self.status.value, "mapping": self.mapping, "nodes": self.nodes}


class _Budget(Exception):
    pass


def _relabel_jointly(sig_g: np.ndarray, sig_h: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """Name signature rows by their sorted position in the union; None if the
    two multisets of rows differ."""
    both = np.concatenate([sig_g, sig_h])
    _, inv = np.unique(both, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    n = sig_g.shape[0]
    cg, ch = inv[:n], inv[n:]
    k = int(inv.max()) + 1 if inv.size else 0
    if not np.array_equal(np.bincount(cg, minlength=k), np.bincount(ch, minlength=k)):
        return None
    return cg, ch


def _refine(
    ag: np.ndarray, ah: np.ndarray, cg: np.ndarray, ch: np.ndarray
) -> tuple[np.ndarray, np.ndarray] | None:
    """Colour refinement run on both graphs in lockstep."""
    ncol = int(max(cg.max(), ch.max())) + 1
    while True:
        eye = np.eye(ncol)
        sg = np.column_stack([cg, np.rint(ag @ eye[cg]).astype(np.int64)])
        sh = np.column_stack([ch, np.rint(ah @ eye[ch]).astype(np.int64)])
        named = _relabel_jointly(sg, sh)
        if named is None:
            return None
        cg, ch = named
        new = int(cg.max()) + 1
        if new == ncol:
            return cg, ch
        ncol = new


def exact_iso(
    g: Graph,
    h: Graph,
    max_vertices: int = ISO_VERTEX_BUDGET,
    node_budget: int = ISO_NODE_BUDGET,
) -> IsoResult:
    """Decide isomorphism. A returned mapping sends vertex u of g to mapping[u] in h."""
    if g.v != h.v or g.num_edges != h.num_edges:
        return IsoResult(Iso.NOT_ISOMORPHIC)
    if g.v > max_vertices:
        return IsoResult(Iso.UNDECIDED_BUDGET)
    if g.v == 0:
        return IsoResult(Iso.ISOMORPHIC, [])
    pg, ph = pattern_census(g), pattern_census(h)
    if pg.census != ph.census:
        return IsoResult(Iso.NOT_ISOMORPHIC)
    # colour: (degree, sorted lambda row, neighbourhood census)
    lg, lh = local_census(g), local_census(h)
    if sorted(lg) != sorted(lh):
        return IsoResult(Iso.NOT_ISOMORPHIC)
    digests = {d: i for i, d in enumerate(sorted(set(lg)))}
    sg = np.array([(d,) + p + (digests[c],) for d, p, c in zip(g.degrees, pg.patterns, lg)], dtype=np.int64)
    sh = np.array([(d,) + p + (digests[c],) for d, p, c in zip(h.degrees, ph.patterns, lh)], dtype=np.int64)
    named = _relabel_jointly(sg.reshape(g.v, -1), sh.reshape(h.v, -1))
    if named is None:
        return IsoResult(Iso.NOT_ISOMORPHIC)
    ag = g.matrix.astype(np.float64)
    ah = h.matrix.astype(np.float64)
    state = {"nodes": 0}

    def search(cg: np.ndarray, ch: np.ndarray) -> list[int] | None:
        state["nodes"] += 1
        if state["nodes"] > node_budget:
            raise _Budget
        refined = _refine(ag, ah, cg, ch)
        if refined is None:
            return None
        cg, ch = refined
        sizes = np.bincount(cg)
        if sizes.max() == 1:
            mapping = np.empty(g.v, dtype=np.int64)
            mapping[np.argsort(cg)] = np.argsort(ch)
            perm = [int(x) for x in mapping]
            return perm if _is_isomorphism(g, h, perm) else None
        target = int(np.flatnonzero(sizes > 1)[np.argmin(sizes[sizes > 1])])
        u = int(np.flatnonzero(cg == target)[0])
        fresh = int(sizes.size)
        for w in np.flatnonzero(ch == target):
            cg2, ch2 = cg.copy(), ch.copy()
            cg2[u] = fresh
            ch2[int(w)] = fresh
            found = search(cg2, ch2)
            if found is not None:
                return found
        return None

    try:
        mapping = search(*named)
    except _Budget:
        return IsoResult(Iso.UNDECIDED_BUDGET, nodes=state["nodes"])
    if mapping is None:
        return IsoResult(Iso.NOT_ISOMORPHIC, nodes=state["nodes"])
    return IsoResult(Iso.ISOMORPHIC, mapping, nodes=state["nodes"])


def _is_isomorphism(g: Graph, h: Graph, perm: list[int]) -> bool:
    for u, row in enumerate(g.rows):
        img = 0
        r = row
        while r:
            low = r & -r
            img |= 1 << perm[low.bit_length() - 1]
            r ^= low
        if h.rows[perm[u]] != img:
            return False
    return True
