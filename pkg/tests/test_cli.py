import json
import os
import subprocess
import sys

import jsonschema
import pytest

from jsgm.cli import main
from jsgm.fixtures import FIXTURE_SETS
from jsgm.formats import load_schema, read_graph


def check(doc, name):
    jsonschema.validate(doc, load_schema(name))
    return doc


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_gen(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "--spec", "8,3,{0}")
    assert code == 0 and out.strip().startswith("w")  # 56 vertices -> chr(56 + 63)
    path = tmp_path / "k83.json"
    assert run(capsys, "gen", "--spec", "8,3,{0}", "--format", "json", "--out", path)[0] == 0
    doc = check(json.loads(path.read_text()), "graph")
    assert doc["S"] == [0] and len(doc["edges"]) == 56 * 10 // 2
    assert read_graph(path).v == 56


def test_family_outputs(tmp_path, capsys):
    for argv in (["--name", "A", "--m", 2, "--n", 10], ["--name", "B", "--m", 0, "--k", 3, "--validate"],
                 ["--name", "JNK3", "--n", 8, "--k", 4, "--validate"], ["--name", "K2PREFIX", "--n", 9, "--k", 4]):
        code, out, _ = run(capsys, "family", *argv)
        assert code == 0
        doc = check(json.loads(out), "family")
        if "validation" in doc:
            assert check(doc["validation"], "validation")["valid"]
    code, out, _ = run(capsys, "family", "--name", "GENERALIZATION", "--m", 0, "--k", 3)
    doc = check(json.loads(out), "generalization")
    assert doc["witness_count_in_C1"] == 4 and doc["failure"]


def test_family_usage_errors(capsys):
    code, _, err = run(capsys, "family", "--name", "A", "--m", 1, "--n", 6)
    assert code == 2 and json.loads(err)["error"] == "usage"
    code, _, err = run(capsys, "family", "--name", "A", "--m", 2)
    assert code == 2 and "--n" in json.loads(err)["message"]
    code, _, err = run(capsys, "family", "--name", "Z")
    assert code == 2


def test_family_unchecked(capsys):
    code, out, _ = run(capsys, "family", "--name", "A", "--m", 1, "--n", 6, "--unchecked")
    assert code == 0 and json.loads(out)["spec"] == {"n": 6, "k": 3, "S": [0, 1]}


def test_verify_switch_cospectral_iso(tmp_path, capsys):
    part = tmp_path / "p.json"
    run(capsys, "family", "--name", "B", "--m", 0, "--k", 3, "--out", tmp_path / "fam.json")
    fam = json.loads((tmp_path / "fam.json").read_text())
    part.write_text(json.dumps(fam["partition"]))
    code, out, _ = run(capsys, "verify-partition", "--spec", "8,3,{0}", "--partition", part)
    assert code == 0 and check(json.loads(out), "validation")["valid"]
    code, out, _ = run(capsys, "verify-partition", "--spec", "8,3,{0}", "--partition", part, "--implicit")
    assert code == 0
    g6, h6 = tmp_path / "g.g6", tmp_path / "h.g6"
    run(capsys, "gen", "--spec", "8,3,{0}", "--out", g6)
    assert run(capsys, "switch", "--spec", "8,3,{0}", "--partition", part, "--out", h6)[0] == 0
    cert = tmp_path / "cert.json"
    code, out, _ = run(capsys, "cospectral", g6, h6, "--certificate-out", cert)
    assert code == 0 and out.strip() == "COSPECTRAL_MOD_PRIMES"
    check(json.loads(cert.read_text()), "cospectral")
    code, out, _ = run(capsys, "iso", g6, h6)
    assert code == 1 and check(json.loads(out), "noniso")["verdict"] == "DISTINGUISHED"
    code, out, _ = run(capsys, "iso", g6, h6, "--exact")
    assert code == 1 and out.strip() == "NOT_ISOMORPHIC"
    code, out, _ = run(capsys, "iso", g6, g6, "--exact")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "ISOMORPHIC" and len(json.loads(lines[1])) == 56


def test_verify_invalid_partition(tmp_path, capsys):
    part = tmp_path / "bad.json"
    part.write_text(json.dumps({"blocks": [[0, 1, 2, 3]]}))
    code, out, _ = run(capsys, "verify-partition", "--spec", "8,3,{0}", "--partition", part)
    assert code == 1 and not check(json.loads(out), "validation")["valid"]
    code, _, _ = run(capsys, "switch", "--spec", "8,3,{0}", "--partition", part, "--out", tmp_path / "x.g6")
    assert code == 1
    part.write_text(json.dumps({"blocks": [[0, 1], [1, 2]]}))
    code, _, err = run(capsys, "verify-partition", "--spec", "8,3,{0}", "--partition", part)
    assert code == 2 and json.loads(err)["error"] == "usage"


def test_cospectral_negative(tmp_path, capsys):
    a, b = tmp_path / "a.g6", tmp_path / "b.g6"
    a.write_text("Bw\n")  # triangle
    b.write_text("Bo\n")  # path on 3 vertices
    code, out, _ = run(capsys, "cospectral", a, b)
    assert code == 1 and out.strip() == "NOT_COSPECTRAL"
    code, _, err = run(capsys, "cospectral", a, tmp_path / "missing.g6")
    assert code == 2 and "error" in json.loads(err)


def test_predict(capsys):
    code, out, _ = run(capsys, "predict", "--family", "B", "--m", 1, "--k", 4, "--brute")
    doc = check(json.loads(out), "prediction")
    assert code == 0 and doc["match"] and doc["predicted"] == {"lost": 18, "gained": 6, "delta": -12}
    code, out, _ = run(capsys, "predict", "--family", "A", "--m", 2, "--n", 10)
    assert check(json.loads(out), "prediction")["predicted"]["delta"] == 60


def test_k2prefix(capsys):
    code, out, _ = run(capsys, "k2prefix", "--k", 6)
    assert code == 0 and check(json.loads(out), "k2prefix")["predicted_n"] == 25
    code, out, _ = run(capsys, "k2prefix", "--k", 3)
    assert json.loads(out)["predicted_n"] is None
    code, out, _ = run(capsys, "k2prefix", "--k", 4, "--n", 9, "--m", 1, "--verify")
    doc = check(json.loads(out), "k2prefix")
    assert code == 1 and doc["observed_counts"] == [6, 15] and doc["counts"]["case_iii"] == 15


def test_search(tmp_path, capsys):
    out_path = tmp_path / "s.json"
    code, _, _ = run(capsys, "search", "--spec", "8,3,{0}", "--size", 6, "--mates", "--out", out_path, "--workers", 1)
    docs = check(json.loads(out_path.read_text()), "search")
    assert code == 0 and len(docs) == 3
    assert all(d["mate_status"] == "NONISOMORPHIC" for d in docs)
    code, out, _ = run(capsys, "search", "--spec", "9,3,{0}", "--size", 4, "--mode", "backtrack")
    assert code == 0 and json.loads(out) == []
    code, _, err = run(capsys, "search", "--size", 4)
    assert code == 2


def test_budget_exit_code(capsys):
    code, _, err = run(capsys, "gen", "--spec", "40,8,{0}")
    assert code == 3 and json.loads(err)["error"] == "budget"


def test_table(tmp_path, capsys):
    js = tmp_path / "t.json"
    code, out, _ = run(capsys, "table", "--k", 3, "--n", "9", "--columns", "{0}", "--max-size", 4, "--json-out", js)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].split("\t")[:4] == ["n", "S", "published", "derived"]
    row = lines[1].split("\t")
    assert row[:4] == ["9", "{0}", "0e10", "0e4"]
    check(json.loads(js.read_text()), "table")


def test_pipeline_family(tmp_path, capsys):
    d1, d2 = tmp_path / "r1", tmp_path / "r2"
    code, out, _ = run(capsys, "pipeline", "--family", "B", "--m", 0, "--k", 3, "--out-dir", d1)
    verdicts = check(json.loads(out), "verdicts")
    assert code == 0
    assert verdicts["cospectral"] == "COSPECTRAL_MOD_PRIMES"
    assert verdicts["noniso_certificate"] == "DISTINGUISHED"
    manifest = check(json.loads((d1 / "manifest.json").read_text()), "manifest")
    for name in ("partition", "validation", "verdicts", "cospectral"):
        fname = "certificate.json" if name == "cospectral" else f"{name}.json"
        check(json.loads((d1 / fname).read_text()), name)
    assert set(manifest["outputs"]) == {"G.g6", "H.g6", "certificate.json", "partition.json",
                                        "validation.json", "verdicts.json"}
    run(capsys, "pipeline", "--family", "B", "--m", 0, "--k", 3, "--out-dir", d2)
    again = json.loads((d2 / "manifest.json").read_text())
    assert again["outputs"] == manifest["outputs"]


def test_pipeline_block_file(tmp_path, capsys):
    block = tmp_path / "fixture1.json"
    block.write_text(json.dumps({"blocks": [[list(s) for s in FIXTURE_SETS["two-4-cycles"][0]]]}))
    code, out, _ = run(capsys, "pipeline", "--spec", "8,4,{2}", "--block-file", block, "--out-dir", tmp_path / "o")
    assert code == 0 and json.loads(out)["mate"] == "NONISOMORPHIC"


def test_pipeline_usage(tmp_path, capsys):
    code, _, err = run(capsys, "pipeline", "--family", "A", "--m", 1, "--n", 6, "--out-dir", tmp_path)
    assert code == 2 and json.loads(err)["error"] == "usage"
    code, _, err = run(capsys, "pipeline", "--spec", "8,4,{2}", "--out-dir", tmp_path)
    assert code == 2


def test_fixtures_command(capsys):
    code, out, _ = run(capsys, "fixtures", "--no-spectra")
    doc = check(json.loads(out), "fixtures")
    assert doc["sets"]["two-4-cycles"]["shape_claim_holds"]
    # exit status reflects whether every recorded shape was reproduced
    assert code == (0 if doc["all_shape_claims_hold"] else 1)


def test_argparse_usage_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--spec", "garbage"])
    assert exc.value.code == 2


def test_module_entry_point_and_workers_env(tmp_path):
    env = dict(os.environ, JS_WORKERS="2")
    res = subprocess.run([sys.executable, "-m", "jsgm", "search", "--spec", "8,3,{0}", "--size", "6"],
                         capture_output=True, text=True, env=env, timeout=300)
    assert res.returncode == 0
    assert len(json.loads(res.stdout)) == 3
    res = subprocess.run([sys.executable, "-m", "jsgm", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "jsgm" in res.stdout
