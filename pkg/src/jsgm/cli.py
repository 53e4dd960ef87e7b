"""Command-line entry point: ``jsgm <subcommand> ...``.

Exit codes: 0 success, 1 verified negative (not cospectral, not isomorphic,
invalid partition, claim mismatch), 2 usage error, 3 budget exceeded.
Errors are printed to stderr as a JSON object.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .formats import (
    graph_to_json,
    partition_from_json,
    read_graph,
    to_graph6,
    write_graph,
)
from .graph import BudgetExceeded, Graph, JohnsonOracle, JohnsonSpec, build_johnson, parse_spec
from .invariants import Iso, NonIso, exact_iso, noniso_certificate
from .search import (
    MateStatus,
    Mode,
    SearchConfig,
    default_workers,
    resolve_mates,
    search,
    verify_fixture_sets,
)
from .spectra import PRIME_LIST_VERSION, Cospectrality, cospectral
from .switching import (
    ParameterError,
    PartitionError,
    SwitchingPartition,
    apply_switch,
    family_A,
    family_B,
    johnson_multiblock,
    k2prefix_block,
    k2prefix_counts,
    k2prefix_predicate,
    lambda_changes,
    multiblock_generalization_check,
    predict_lambda_A,
    predict_lambda_B,
    validate_partition,
)
from .table import derive_table

log = logging.getLogger("jsgm")

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _dump(doc: Any, out: str | None = None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _spec_arg(text: str) -> JohnsonSpec:
    try:
        return parse_spec(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _load_graph(args) -> Graph:
    if getattr(args, "spec", None) is not None:
        return build_johnson(args.spec)
    if getattr(args, "graph", None):
        return read_graph(args.graph)
    raise UsageError("give --spec or --graph")


def _load_partition(path: str, g) -> SwitchingPartition:
    doc = json.loads(Path(path).read_text())
    return SwitchingPartition(partition_from_json(doc, g))


def _family(args):
    name = args.name.upper()
    if name == "A":
        _need(args, "m", "n")
        return family_A(args.m, args.n, unchecked=args.unchecked)
    if name == "B":
        _need(args, "m", "k")
        return family_B(args.m, args.k, unchecked=args.unchecked)
    raise UsageError(f"unknown family {args.name!r}")


def _need(args, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"missing {' '.join(missing)}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    g = build_johnson(args.spec)
    if args.format == "json":
        _dump(graph_to_json(g), args.out)
    elif args.out:
        Path(args.out).write_bytes(to_graph6(g) + b"\n")
    else:
        print(to_graph6(g).decode())
    log.info("%s: %d vertices, degree %d", args.spec, g.v, args.spec.degree)
    return EXIT_OK


def cmd_family(args) -> int:
    name = args.name.upper()
    if name in ("A", "B"):
        fam = _family(args)
        doc = fam.to_json()
        if args.validate:
            g = build_johnson(fam.spec)
            doc["validation"] = validate_partition(g, fam.partition()).to_json()
        _dump(doc, args.out)
        return EXIT_OK
    if name == "JNK3":
        _need(args, "n", "k")
        spec, blocks = johnson_multiblock(args.n, args.k)
        idx = [[spec.index(s) for s in b] for b in blocks]
        doc = {
            "family": "JNK3",
            "params": {"n": args.n, "k": args.k},
            "spec": spec.to_json(),
            "partition": {"blocks": idx},
            "blocks_as_subsets": [[s.elements() for s in b] for b in blocks],
        }
        if args.validate:
            doc["validation"] = validate_partition(build_johnson(spec), SwitchingPartition(idx)).to_json()
        _dump(doc, args.out)
        return EXIT_OK
    if name == "K2PREFIX":
        _need(args, "n", "k")
        m = args.m or 0
        spec = JohnsonSpec(args.n, args.k, range(m + 1))
        block = k2prefix_block(spec)
        doc = {
            "family": "K2PREFIX",
            "params": {"n": args.n, "k": args.k, "m": m},
            "spec": spec.to_json(),
            "partition": {"blocks": [[spec.index(s) for s in block]]},
            "blocks_as_subsets": [[s.elements() for s in block]],
        }
        _dump(doc, args.out)
        return EXIT_OK
    if name == "GENERALIZATION":
        _need(args, "m", "k")
        rep = multiblock_generalization_check(args.m, args.k, args.n)
        _dump(rep.to_json(), args.out)
        return EXIT_OK
    raise UsageError(f"unknown family {args.name!r}")


def cmd_verify_partition(args) -> int:
    if args.implicit:
        if args.spec is None:
            raise UsageError("--implicit needs --spec")
        g = JohnsonOracle(args.spec)
    else:
        g = _load_graph(args)
    p = _load_partition(args.partition, g)
    rep = validate_partition(g, p)
    _dump(rep.to_json(), args.out)
    return EXIT_OK if rep.valid else EXIT_NEGATIVE


def cmd_switch(args) -> int:
    g = _load_graph(args)
    p = _load_partition(args.partition, g)
    rep = validate_partition(g, p)
    if not rep.valid:
        _dump(rep.to_json())
        return EXIT_NEGATIVE
    h = apply_switch(g, p, rep)
    write_graph(h, args.out)
    log.info("switched %d half-class vertices", int(sum(len(rep.half_vertices(i)) for i in range(p.t))))
    return EXIT_OK


def cmd_cospectral(args) -> int:
    g, h = read_graph(args.g1), read_graph(args.g2)
    if g.v != h.v:
        print(json.dumps({"verdict": Cospectrality.NOT_COSPECTRAL.value, "reason": "vertex counts differ"}))
        return EXIT_NEGATIVE
    verdict, cg, ch = cospectral(g, h, workers=args.workers)
    doc = {"verdict": verdict.value, "g1": cg.to_json(), "g2": ch.to_json()}
    if args.certificate_out:
        _dump(doc, args.certificate_out)
    print(verdict.value)
    return EXIT_OK if verdict is Cospectrality.COSPECTRAL_MOD_PRIMES else EXIT_NEGATIVE


def cmd_iso(args) -> int:
    g, h = read_graph(args.g1), read_graph(args.g2)
    if args.exact:
        res = exact_iso(g, h, node_budget=args.node_budget)
        print(res.status.value)
        if res.mapping is not None:
            print(json.dumps(res.mapping))
        return {Iso.ISOMORPHIC: EXIT_OK, Iso.NOT_ISOMORPHIC: EXIT_NEGATIVE}.get(res.status, EXIT_BUDGET)
    cert = noniso_certificate(g, h)
    print(json.dumps(cert.to_json(), sort_keys=True))
    return EXIT_NEGATIVE if cert.verdict is NonIso.DISTINGUISHED else EXIT_OK


def cmd_predict(args) -> int:
    name = args.family.upper()
    if name == "A":
        _need(args, "m", "n")
        pred = predict_lambda_A(args.m, args.n)
        fam = family_A(args.m, args.n)
        x, y = "c0", "v"
    elif name == "B":
        _need(args, "m", "k")
        pred = predict_lambda_B(args.m, args.k)
        fam = family_B(args.m, args.k)
        x, y = "c0", "w"
    else:
        raise UsageError(f"unknown family {args.family!r}")
    doc: dict[str, Any] = {"family": name, "params": fam.params, "predicted": pred.to_json()}
    if args.brute:
        g = build_johnson(fam.spec)
        h = apply_switch(g, fam.partition())
        xi, yi = fam.witness_index(x), fam.witness_index(y)
        seen = lambda_changes(g, h, xi, yi)
        doc["brute_force"] = seen.to_json()
        doc["lambda_before"] = g.common_neighbors(xi, yi)
        doc["lambda_after"] = h.common_neighbors(xi, yi)
        doc["match"] = seen == pred
        _dump(doc, args.out)
        return EXIT_OK if seen == pred else EXIT_NEGATIVE
    _dump(doc, args.out)
    return EXIT_OK


def cmd_k2prefix(args) -> int:
    doc: dict[str, Any] = {}
    if args.k is not None:
        doc["k"] = args.k
        doc["predicted_n"] = k2prefix_predicate(args.k)
    if args.n is not None and args.k is not None:
        m = args.m or 0
        doc["counts"] = k2prefix_counts(args.n, args.k, m).to_json()
        doc["n"], doc["m"] = args.n, m
        if args.verify:
            spec = JohnsonSpec(args.n, args.k, range(m + 1))
            oracle = JohnsonOracle(spec)
            block = [spec.index(s) for s in k2prefix_block(spec)]
            rep = validate_partition(oracle, SwitchingPartition([block]))
            outside = rep.classes[0] != -1
            observed = sorted(set(int(c) for c in rep.counts[0][outside]))
            doc["observed_counts"] = observed
            doc["validation"] = {k: v for k, v in rep.to_json().items() if k != "violations"}
            doc["num_violations"] = len(rep.violations)
            _dump(doc, args.out)
            return EXIT_OK if rep.valid else EXIT_NEGATIVE
    _dump(doc, args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    g = _load_graph(args)
    anchor = None if args.no_anchor else args.anchor
    if anchor is not None and not args.vertex_transitive and args.spec is None:
        log.warning("anchored search on an arbitrary graph is complete only if it is vertex-transitive")
    cfg = SearchConfig(
        size=args.size,
        mode=Mode(args.mode),
        shapes=tuple(args.shapes or ()),
        anchor=anchor,
        workers=args.workers,
        limit=args.limit,
    )
    out = search(g, cfg)
    if args.mates:
        resolve_mates(g, out, spectra=args.spectra)
    docs = [r.to_json(g) for r in out.results]
    if args.include_trivial:
        docs += [r.to_json(g) for r in out.trivial]
    _dump(docs, args.out)
    log.info("%d switching sets, %d trivial, %d nodes, %.2fs", len(out.results), len(out.trivial),
             out.nodes, out.seconds)
    return EXIT_OK


def cmd_table(args) -> int:
    n_values = None
    if args.n:
        n_values = [int(x) for x in args.n.split(",")]
    columns = None
    if args.columns:
        columns = [tuple(int(x) for x in c.strip("{} ").split(",")) for c in args.columns.split(";")]
    sep = "\t" if args.delimiter == "tab" else args.delimiter
    print(sep.join(["n", "S", "published", "derived", "mode", "found_size", "mates", "seconds"]))

    def emit(cell):
        print(sep.join([
            str(cell.spec.n),
            "{" + ",".join(map(str, cell.spec.S)) + "}",
            cell.published or "-",
            cell.derived,
            cell.mode,
            str(cell.found_size or "-"),
            ",".join(f"{k}:{v}" for k, v in cell.mates.items()) or "-",
            f"{cell.seconds:.2f}",
        ]), flush=True)

    cells = derive_table(args.k, n_values, columns, args.max_size, args.mode, progress=emit)
    if args.json_out:
        _dump([c.to_json() for c in cells], args.json_out)
    return EXIT_OK


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def cmd_pipeline(args) -> int:
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    if args.family:
        args.name = args.family
        fam = _family(args)
        spec, p = fam.spec, fam.partition()
        g = build_johnson(spec)
    else:
        if args.spec is None or not args.block_file:
            raise UsageError("give --family or both --spec and --block-file")
        spec = args.spec
        g = build_johnson(spec)
        p = _load_partition(args.block_file, g)
    timings["build"] = time.perf_counter() - t0

    t = time.perf_counter()
    rep = validate_partition(g, p)
    timings["validate"] = time.perf_counter() - t
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs: dict[str, Path] = {}

    def write_json(name: str, doc: Any) -> None:
        path = out_dir / name
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        outputs[name] = path

    write_json("partition.json", p.to_json())
    write_json("validation.json", rep.to_json())
    verdicts: dict[str, Any] = {"partition_valid": rep.valid, "nontrivial": rep.nontrivial}
    code = EXIT_OK
    if rep.valid:
        t = time.perf_counter()
        h = apply_switch(g, p, rep)
        timings["switch"] = time.perf_counter() - t
        for name, graph in (("G.g6", g), ("H.g6", h)):
            (out_dir / name).write_bytes(to_graph6(graph) + b"\n")
            outputs[name] = out_dir / name
        t = time.perf_counter()
        verdict, cg, ch = cospectral(g, h, workers=args.workers)
        timings["cospectral"] = time.perf_counter() - t
        write_json("certificate.json", {"verdict": verdict.value, "G": cg.to_json(), "H": ch.to_json()})
        t = time.perf_counter()
        cert = noniso_certificate(g, h)
        timings["noniso"] = time.perf_counter() - t
        verdicts["cospectral"] = verdict.value
        verdicts["noniso_certificate"] = cert.verdict.value
        verdicts["noniso_invariant"] = cert.invariant
        mate = MateStatus.NONISOMORPHIC if cert.verdict is NonIso.DISTINGUISHED else None
        if args.exact or mate is None:
            t = time.perf_counter()
            iso = exact_iso(g, h)
            timings["exact_iso"] = time.perf_counter() - t
            verdicts["exact_iso"] = iso.status.value
            mate = {
                Iso.ISOMORPHIC: MateStatus.ISOMORPHIC,
                Iso.NOT_ISOMORPHIC: MateStatus.NONISOMORPHIC,
                Iso.UNDECIDED_BUDGET: MateStatus.UNDECIDED,
            }[iso.status]
        verdicts["mate"] = mate.value
        write_json("verdicts.json", verdicts)
        if verdict is not Cospectrality.COSPECTRAL_MOD_PRIMES:
            code = EXIT_NEGATIVE
    else:
        write_json("verdicts.json", verdicts)
        code = EXIT_NEGATIVE
    manifest = {
        "command": ["jsgm", *args.argv],
        "spec": spec.to_json(),
        "tool_version": __version__,
        "prime_list_version": PRIME_LIST_VERSION,
        "timings": {k: round(v, 6) for k, v in timings.items()},
        "outputs": {name: _sha256(path) for name, path in sorted(outputs.items())},
        "verdicts": verdicts,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(json.dumps(verdicts, sort_keys=True))
    return code


def cmd_fixtures(args) -> int:
    report = verify_fixture_sets(spectra=not args.no_spectra, strict=False)
    _dump(report, args.out)
    return EXIT_OK if report["all_shape_claims_hold"] else EXIT_NEGATIVE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jsgm", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"jsgm {__version__}")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def graph_source(p):
        p.add_argument("--spec", type=_spec_arg, help="n,k,{S} e.g. '10,5,{0,1,2}' (quote it)")
        p.add_argument("--graph", help="graph6 file or labelled .json")

    p = sub.add_parser("gen", help="build J_S(n,k)")
    p.add_argument("--spec", type=_spec_arg, required=True)
    p.add_argument("--format", choices=["g6", "json"], default="g6")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("family", help="explicit switching constructions")
    p.add_argument("--name", required=True, help="A | B | JNK3 | K2PREFIX | GENERALIZATION")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--unchecked", action="store_true",
                   help="skip the proved parameter bounds (no correctness claim)")
    p.add_argument("--validate", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("verify-partition", help="check the Godsil-McKay conditions")
    graph_source(p)
    p.add_argument("--partition", required=True)
    p.add_argument("--implicit", action="store_true", help="compute adjacency on demand")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_partition)

    p = sub.add_parser("switch", help="apply a switch and write the new graph")
    graph_source(p)
    p.add_argument("--partition", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_switch)

    p = sub.add_parser("cospectral", help="compare characteristic polynomials mod primes")
    p.add_argument("g1")
    p.add_argument("g2")
    p.add_argument("--certificate-out")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_cospectral)

    p = sub.add_parser("iso", help="non-isomorphism certificate or exact test")
    p.add_argument("g1")
    p.add_argument("g2")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--node-budget", type=int, default=20_000)
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("predict", help="closed-form common-neighbour changes")
    p.add_argument("--family", required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--brute", action="store_true", help="also count on the built graphs")
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("k2prefix", help="sets containing [k-2]: parameters and counts")
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--verify", action="store_true", help="count neighbours on the implicit graph")
    p.add_argument("--out")
    p.set_defaults(func=cmd_k2prefix)

    p = sub.add_parser("search", help="search for switching sets of one size")
    graph_source(p)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="exhaustive")
    p.add_argument("--shapes", nargs="*")
    p.add_argument("--anchor", type=int, default=0)
    p.add_argument("--no-anchor", action="store_true")
    p.add_argument("--vertex-transitive", action="store_true")
    p.add_argument("--workers", type=int, default=default_workers())
    p.add_argument("--limit", type=int)
    p.add_argument("--mates", action="store_true", help="decide whether each mate is isomorphic")
    p.add_argument("--spectra", action="store_true", help="with --mates, also certify cospectrality")
    p.add_argument("--include-trivial", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("table", help="re-derive table cells at sizes <= --max-size")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", help="comma-separated n values (default: the published rows)")
    p.add_argument("--columns", help="';'-separated S values, e.g. '{0};{1,2}'")
    p.add_argument("--max-size", type=int, default=6)
    p.add_argument("--mode", choices=["auto", "exhaustive", "backtrack"], default="auto")
    p.add_argument("--delimiter", default="tab")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("pipeline", help="build, validate, switch, certify, write artifacts")
    p.add_argument("--family")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--unchecked", action="store_true")
    p.add_argument("--spec", type=_spec_arg)
    p.add_argument("--block-file")
    p.add_argument("--out-dir", default="jsgm-out")
    p.add_argument("--exact", action="store_true", help="always run the exact isomorphism test")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("fixtures", help="verify the two explicit size-8 switching sets")
    p.add_argument("--no-spectra", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fixtures)
    return ap


def _error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        return args.func(args)
    except (UsageError, ParameterError, PartitionError) as exc:
        _error("usage", str(exc))
        return EXIT_USAGE
    except BudgetExceeded as exc:
        _error("budget", str(exc))
        return EXIT_BUDGET
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        _error(type(exc).__name__, str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
