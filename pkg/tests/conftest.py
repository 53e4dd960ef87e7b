import itertools
import random

import numpy as np
import pytest

from jsgm.graph import Graph
from jsgm.spectra import Cospectrality, cospectral
from jsgm.switching import SwitchingPartition, apply_switch, validate_partition


def naive_counts(g: Graph, block) -> list[int]:
    """Neighbours in ``block`` for every vertex, by explicit pair tests."""
    members = set(block)
    return [sum(1 for c in members if g.has_edge(u, c)) for u in range(g.v)]


def naive_valid(g: Graph, blocks) -> bool:
    """The switching conditions checked straight from their definition."""
    covered = set().union(*map(set, blocks))
    for bi in blocks:
        for bj in blocks:
            counts = {sum(1 for c in bj if g.has_edge(u, c)) for u in bi}
            if len(counts) > 1:
                return False
    for u in range(g.v):
        if u in covered:
            continue
        for b in blocks:
            c = sum(1 for w in b if g.has_edge(u, w))
            if c not in (0, len(b) / 2, len(b)):
                return False
    return True


def naive_switch(g: Graph, block) -> Graph:
    """Single-block switch written out edge by edge."""
    members = set(block)
    half = len(members) / 2
    edges = set()
    for u, w in itertools.combinations(range(g.v), 2):
        adj = g.has_edge(u, w)
        for x, c in ((u, w), (w, u)):
            if c in members and x not in members:
                if sum(1 for m in members if g.has_edge(x, m)) == half:
                    adj = not adj
        if adj:
            edges.add((u, w))
    return Graph.from_edges(g.v, edges)


def switch_and_certify(g: Graph, blocks) -> Graph:
    """Validate, switch, and require the mate to be cospectral."""
    p = SwitchingPartition(blocks)
    rep = validate_partition(g, p)
    assert rep.valid, rep.violations[:3]
    h = apply_switch(g, p, rep)
    verdict, _, _ = cospectral(g, h)
    assert verdict is Cospectrality.COSPECTRAL_MOD_PRIMES
    return h


def random_graph(v: int, prob: float, seed: int) -> Graph:
    rng = random.Random(seed)
    edges = [(a, b) for a, b in itertools.combinations(range(v), 2) if rng.random() < prob]
    return Graph.from_edges(v, edges)


def char_poly_exact(g: Graph) -> list[int]:
    """Integer characteristic polynomial via sympy, lowest degree first."""
    import sympy

    x = sympy.symbols("x")
    m = sympy.Matrix(g.matrix.tolist())
    poly = m.charpoly(x)
    return [int(c) for c in reversed(poly.all_coeffs())]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# --- acceptance reporting ------------------------------------------------------

_ACCEPTANCE: dict[int, tuple[str, str, float, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, summary = marker.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        status = "PASS" if report.passed else "FAIL"
        reason = ""
        crash = getattr(report.longrepr, "reprcrash", None)
        if report.failed and crash is not None:
            reason = crash.message.splitlines()[0]
        _ACCEPTANCE[number] = (status, summary, report.duration, reason)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, summary, seconds, reason = _ACCEPTANCE[number]
        line = f"criterion {number}: {status} ({seconds:.1f}s) {summary}"
        terminalreporter.write_line(line + (f" | {reason}" if reason else ""))
