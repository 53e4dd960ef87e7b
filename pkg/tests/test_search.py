import itertools

import numpy as np
import pytest

from conftest import random_graph, switch_and_certify
from jsgm.combin import KSubset
from jsgm.graph import BudgetExceeded, Graph, JohnsonSpec, build_johnson
from jsgm.search import (
    MateStatus,
    Mode,
    SearchConfig,
    mate_status,
    resolve_mates,
    search,
)
from jsgm.switching import SwitchingPartition, family_B, validate_partition


def brute_switching_sets(g: Graph, size: int, anchor=0):
    """Every valid single block of the given size, split into (nontrivial, trivial)."""
    a = g.matrix
    half = size // 2
    nontrivial, trivial = [], []
    pool = range(g.v) if anchor is None else [u for u in range(g.v) if u != anchor]
    base = () if anchor is None else (anchor,)
    for rest in itertools.combinations(pool, size - len(base)):
        block = tuple(sorted(base + rest))
        idx = list(block)
        inner = a[np.ix_(idx, idx)].sum(axis=1)
        if len(set(inner.tolist())) != 1:
            continue
        mask = np.ones(g.v, dtype=bool)
        mask[idx] = False
        out = a[mask][:, idx].sum(axis=1)
        if not np.isin(out, (0, half, size)).all():
            continue
        (nontrivial if (out == half).any() else trivial).append(block)
    return nontrivial, trivial


def induced_shape(g: Graph, block) -> str | None:
    sub = g.induced(list(block))
    deg = set(sub.degrees)
    if deg == {0}:
        return "independent-set"
    if deg == {1}:
        return "induced-matching"
    if deg == {len(block) - 1}:
        return "clique"
    if deg == {2}:
        seen, stack = {0}, [0]
        while stack:
            for w in sub.neighbors(stack.pop()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return "induced-cycle" if len(seen) == sub.v else None
    return None


@pytest.mark.parametrize("spec,size", [
    (JohnsonSpec(7, 3, [0]), 4),
    (JohnsonSpec(7, 3, [1]), 4),
    (JohnsonSpec(8, 3, [0]), 4),
    (JohnsonSpec(6, 3, [0, 2]), 4),
    (JohnsonSpec(6, 3, [1]), 6),
    (JohnsonSpec(8, 4, [2]), 4),
], ids=str)
def test_exhaustive_matches_brute_force(spec, size):
    g = build_johnson(spec)
    out = search(g, SearchConfig(size=size))
    nontrivial, trivial = brute_switching_sets(g, size)
    assert [r.block for r in out.results] == nontrivial
    assert [r.block for r in out.trivial] == trivial


@pytest.mark.parametrize("seed", range(6))
def test_unanchored_matches_brute_force_on_random_graphs(seed):
    g = random_graph(11, 0.5, seed)
    out = search(g, SearchConfig(size=4, anchor=None))
    nontrivial, trivial = brute_switching_sets(g, 4, anchor=None)
    assert [r.block for r in out.results] == nontrivial
    assert [r.block for r in out.trivial] == trivial


def test_results_revalidate_and_are_sorted():
    g = build_johnson(JohnsonSpec(8, 4, [2]))
    out = search(g, SearchConfig(size=4))
    blocks = [r.block for r in out.results]
    assert blocks == sorted(blocks)
    for r in out.results:
        rep = validate_partition(g, SwitchingPartition([r.block]))
        assert rep.valid and rep.nontrivial
        assert 0 in r.block


def test_backtrack_subset_of_exhaustive():
    for spec, size in [(JohnsonSpec(8, 4, [2]), 4), (JohnsonSpec(8, 3, [0]), 6), (JohnsonSpec(7, 3, [1]), 4)]:
        g = build_johnson(spec)
        ex = {r.block for r in search(g, SearchConfig(size=size)).results}
        bt = search(g, SearchConfig(size=size, mode=Mode.BACKTRACK))
        assert {r.block for r in bt.results} <= ex
        for r in bt.results:
            assert induced_shape(g, r.block) == r.shape
        # every exhaustive hit with an allowed shape is found by backtracking
        allowed = set(SearchConfig(size=size, mode=Mode.BACKTRACK).shapes)
        assert {b for b in ex if induced_shape(g, b) in allowed} == {r.block for r in bt.results}


def test_backtrack_random_graphs_against_brute_force():
    for seed in range(8):
        g = random_graph(10, 0.5, 100 + seed)
        nontrivial, _ = brute_switching_sets(g, 4, anchor=None)
        bt = search(g, SearchConfig(size=4, mode=Mode.BACKTRACK, anchor=None))
        assert [r.block for r in bt.results] == [b for b in nontrivial if induced_shape(g, b)]


def test_deterministic_across_workers():
    g = build_johnson(JohnsonSpec(8, 3, [0]))
    one = search(g, SearchConfig(size=6, workers=1))
    two = search(g, SearchConfig(size=6, workers=2))
    three = search(g, SearchConfig(size=6, workers=3))
    assert [r.block for r in one.results] == [r.block for r in two.results] == [r.block for r in three.results]
    assert [r.block for r in one.trivial] == [r.block for r in two.trivial]


def test_planted_family_block_found_at_any_anchor():
    fam = family_B(0, 3)
    g = build_johnson(fam.spec)
    planted = tuple(fam.partition().blocks[0])
    out = search(g, SearchConfig(size=6))
    assert planted in [r.block for r in out.results]
    # move the anchor off the planted block: a translate through the anchor must appear
    anchor = g.index_of(KSubset.of(8, [4, 5, 6]))
    assert anchor not in planted
    out = search(g, SearchConfig(size=6, anchor=anchor))
    assert out.results and all(anchor in r.block for r in out.results)
    for r in out.results:
        switch_and_certify(g, [r.block])


def test_first_hit_stops_early():
    g = build_johnson(JohnsonSpec(8, 4, [2]))
    full = search(g, SearchConfig(size=4))
    first = search(g, SearchConfig(size=4, first_hit=True))
    assert first.results
    assert {r.block for r in first.results} <= {r.block for r in full.results}
    assert first.nodes <= full.nodes


def test_clique_shape_on_triangle_free_graph():
    petersen = build_johnson(JohnsonSpec(5, 2, [0]))
    out = search(petersen, SearchConfig(size=4, mode=Mode.BACKTRACK, shapes=("clique",)))
    assert out.results == [] and out.trivial == []


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(size=5)
    with pytest.raises(ValueError):
        SearchConfig(size=0)
    with pytest.raises(ValueError):
        SearchConfig(size=4, mode=Mode.BACKTRACK, shapes=("star",))
    with pytest.raises(ValueError):
        SearchConfig(size=8, mode=Mode.BACKTRACK, shapes=("induced-cycle",))
    cfg = SearchConfig(size=6, mode="backtrack")
    assert cfg.shapes == ("independent-set", "induced-matching", "induced-cycle")


def test_candidate_budget():
    g = build_johnson(JohnsonSpec(8, 3, [0]))
    with pytest.raises(BudgetExceeded):
        search(g, SearchConfig(size=6, candidate_budget=1000))


def test_mate_status_and_resolution():
    fam = family_B(0, 3)
    g = build_johnson(fam.spec)
    status, info = mate_status(g, fam.partition().blocks[0], spectra=True)
    assert status is MateStatus.NONISOMORPHIC
    assert info["cospectral"] == "COSPECTRAL_MOD_PRIMES"
    g = build_johnson(JohnsonSpec(8, 4, [2]))
    out = search(g, SearchConfig(size=4, mode=Mode.BACKTRACK))
    resolve_mates(g, out)
    assert {r.mate_status for r in out.results} == {MateStatus.ISOMORPHIC}


def test_result_json_has_subsets():
    g = build_johnson(JohnsonSpec(8, 3, [0]))
    out = search(g, SearchConfig(size=6, limit=1))
    doc = out.results[0].to_json(g)
    assert doc["subsets"][0] == [1, 2, 3]
    assert len(doc["block"]) == 6 and doc["trivial"] is False
