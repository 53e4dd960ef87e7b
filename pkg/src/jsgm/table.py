"""Re-derive cells of the published switching-set tables at desk scale."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .fixtures import PUBLISHED_TABLES, published_cell
from .graph import JohnsonSpec, build_johnson
from .search import MateStatus, Mode, SearchConfig, resolve_mates, search

EXHAUSTIVE_MAX_VERTICES = 130


@dataclass
class Cell:
    spec: JohnsonSpec
    derived: str
    published: str | None
    mode: str
    sizes: list[int]
    found_size: int | None = None
    results: int = 0
    mates: dict[str, int] = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "n": self.spec.n,
            "k": self.spec.k,
            "S": list(self.spec.S),
            "published": self.published,
            "derived": self.derived,
            "mode": self.mode,
            "sizes": self.sizes,
            "found_size": self.found_size,
            "results": self.results,
            "mates": self.mates,
            "seconds": round(self.seconds, 3),
        }


def derive_cell(
    spec: JohnsonSpec,
    max_size: int = 6,
    mode: str = "auto",
    exhaustive_max_vertices: int = EXHAUSTIVE_MAX_VERTICES,
) -> Cell:
    """Search sizes 4, 6, ..., max_size and summarise in the table legend.

    Stops at the first size with a nontrivial switching set. "1-" is only
    reported after every anchored switching set of that size has an
    isomorphic mate; "1?" when some mate stays undecided.
    """
    t0 = time.perf_counter()
    g = build_johnson(spec)
    if mode == "auto":
        mode = "exhaustive" if g.v <= exhaustive_max_vertices else "backtrack"
    sizes = list(range(4, max_size + 1, 2))
    for size in sizes:
        cfg = SearchConfig(size=size, mode=Mode(mode), first_hit=True)
        out = search(g, cfg)
        if not out.results:
            continue
        resolve_mates(g, out, stop_at_nonisomorphic=True)
        statuses = [r.mate_status for r in out.results if r.mate_status]
        if MateStatus.NONISOMORPHIC not in statuses:
            out = search(g, SearchConfig(size=size, mode=Mode(mode)))
            resolve_mates(g, out, stop_at_nonisomorphic=True)
            statuses = [r.mate_status for r in out.results if r.mate_status]
        tally = {s.value: statuses.count(s) for s in MateStatus if statuses.count(s)}
        if MateStatus.NONISOMORPHIC in statuses:
            derived = "1+"
        elif MateStatus.UNDECIDED in statuses:
            derived = "1?"
        else:
            derived = "1-"
        return Cell(spec, derived, published_cell(spec.n, spec.k, spec.S), mode, sizes, size,
                    len(out.results), tally, time.perf_counter() - t0)
    derived = f"0e{max_size}" if mode == "exhaustive" else "0b"
    return Cell(spec, derived, published_cell(spec.n, spec.k, spec.S), mode, sizes,
                seconds=time.perf_counter() - t0)


def table_columns(k: int) -> list[tuple[int, ...]]:
    if k in PUBLISHED_TABLES:
        return list(PUBLISHED_TABLES[k][0])
    singles = [(i,) for i in range(k)]
    pairs = list(itertools.combinations(range(k), 2))
    return singles + pairs


def table_rows(k: int) -> list[int]:
    if k in PUBLISHED_TABLES:
        return sorted(PUBLISHED_TABLES[k][1])
    return list(range(2 * k, 2 * k + 3))


def derive_table(
    k: int,
    n_values: list[int] | None = None,
    columns: list[tuple[int, ...]] | None = None,
    max_size: int = 6,
    mode: str = "auto",
    exhaustive_max_vertices: int = EXHAUSTIVE_MAX_VERTICES,
    progress=None,
) -> list[Cell]:
    cells = []
    for n in n_values or table_rows(k):
        for S in columns or table_columns(k):
            cell = derive_cell(JohnsonSpec(n, k, S), max_size, mode, exhaustive_max_vertices)
            if progress is not None:
                progress(cell)
            cells.append(cell)
    return cells
