"""graph6 and labelled-JSON serialisation for graphs and partitions."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

from .combin import KSubset, from_json
from .graph import Graph, JohnsonSpec

GRAPH6_HEADER = b">>graph6<<"


def _encode_size(n: int) -> bytes:
    if n < 0 or n >= 1 << 36:
        raise ValueError(f"graph6 cannot encode {n} vertices")
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])


def _decode_size(data: bytes) -> tuple[int, int]:
    if data[0] != 126:
        return data[0] - 63, 1
    if data[1] != 126:
        return _sixes(data[1:4]), 4
    return _sixes(data[2:8]), 8


def _sixes(chunk: bytes) -> int:
    value = 0
    for c in chunk:
        if not 63 <= c <= 126:
            raise ValueError(f"invalid graph6 byte {c}")
        value = value << 6 | (c - 63)
    return value


def to_graph6(g: Graph, header: bool = False) -> bytes:
    """Encode the upper triangle column by column, six bits per printable byte."""
    out = bytearray(GRAPH6_HEADER if header else b"")
    out += _encode_size(g.v)
    acc = 0
    nbits = 0
    for j in range(1, g.v):
        row = g.rows[j]
        for i in range(j):
            acc = acc << 1 | (row >> i & 1)
            nbits += 1
            if nbits == 6:
                out.append(acc + 63)
                acc = nbits = 0
    if nbits:
        out.append((acc << (6 - nbits)) + 63)
    return bytes(out)


def from_graph6(data: bytes | str) -> Graph:
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.strip()
    if data.startswith(GRAPH6_HEADER):
        data = data[len(GRAPH6_HEADER):]
    if not data:
        raise ValueError("empty graph6 string")
    n, offset = _decode_size(data)
    body = data[offset:]
    need = (n * (n - 1) // 2 + 5) // 6
    if len(body) != need:
        raise ValueError(f"graph6 body has {len(body)} bytes, expected {need} for n={n}")
    rows = [0] * n
    bit = 0
    values = [c - 63 for c in body]
    if any(not 0 <= x < 64 for x in values):
        raise ValueError("invalid graph6 byte")
    for j in range(1, n):
        for i in range(j):
            if values[bit // 6] >> (5 - bit % 6) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            bit += 1
    return Graph(rows, check=False)


def graph_to_json(g: Graph) -> dict[str, Any]:
    doc: dict[str, Any] = {}
    if g.spec is not None:
        doc.update(g.spec.to_json())
    elif g.labels is not None and g.labels:
        doc["n"] = g.labels[0].n
        doc["k"] = g.labels[0].k
    doc["v"] = g.v
    if g.labels is not None:
        doc["vertices"] = [lab.elements() for lab in g.labels]
    doc["edges"] = [[u, w] for u, w in g.edges()]
    return doc


def graph_from_json(doc: dict[str, Any]) -> Graph:
    labels = None
    spec = None
    if "vertices" in doc:
        labels = [from_json(doc["n"], vs) for vs in doc["vertices"]]
        v = len(labels)
    else:
        v = doc["v"]
    if "S" in doc:
        spec = JohnsonSpec(doc["n"], doc["k"], doc["S"])
    g = Graph.from_edges(v, (tuple(e) for e in doc["edges"]), labels=labels)
    if spec is not None and labels is not None:
        if [spec.index(lab) for lab in labels] == list(range(v)):
            g.spec = spec
    return g


def read_graph(path: str | Path) -> Graph:
    """Load a graph from ``.json`` (labelled format) or graph6 (anything else)."""
    path = Path(path)
    if path.suffix == ".json":
        return graph_from_json(json.loads(path.read_text()))
    line = path.read_bytes().strip().splitlines()[0]
    return from_graph6(line)


def write_graph(g: Graph, path: str | Path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(graph_to_json(g), separators=(",", ":")) + "\n")
    else:
        path.write_bytes(to_graph6(g) + b"\n")


def partition_to_json(blocks) -> dict[str, Any]:
    return {"blocks": [sorted(int(u) for u in b) for b in blocks]}


def partition_from_json(doc: dict[str, Any], g: Graph | None = None) -> list[list[int]]:
    """Blocks as vertex indices; blocks given as subsets ([[1,2,3,4], ...]) need ``g``.

    A block whose entries are themselves lists is read as a list of 1-based
    subsets and resolved to indices through the graph's labels.
    """
    blocks = []
    for b in doc["blocks"]:
        if b and isinstance(b[0], list):
            if g is None:
                raise ValueError("subset-labelled blocks need a labelled graph")
            n = g.labels[0].n if g.labels else g.spec.n
            blocks.append([g.index_of(KSubset.of(n, s)) for s in b])
        else:
            blocks.append([int(u) for u in b])
    return blocks


def load_schema(name: str) -> dict[str, Any]:
    text = resources.files("jsgm").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)
