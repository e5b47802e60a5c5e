import io
import json
import os
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from nlcycles.cli import Cache, load_lattice, parse_indices, run
from nlcycles.errors import BadInput

GOLDEN = Path(__file__).parent / "golden"


def call(*argv):
    out = io.StringIO()
    code = run(["--quiet", *argv], stdout=out)
    return code, out.getvalue()


def call_json(*argv):
    code, text = call(*argv)
    assert code == 0, text
    return json.loads(text)


@pytest.mark.parametrize(
    "name,argv",
    [
        ("slope_cubic", ["slope", "cubic"]),
        ("slope_k3deg2", ["slope", "k3deg2"]),
        ("hodge_d1_theta", ["hodge", "--d", "1", "--method", "theta"]),
        ("generators_d4_P", ["generators", "lambda_2d", "--d", "4", "--flavor", "P"]),
    ],
)
def test_golden_outputs(name, argv):
    code, text = call(*argv)
    assert code == 0
    assert text == (GOLDEN / f"{name}.json").read_text()


def test_spec_examples():
    out = call_json("slope", "cubic")
    assert (out["lower"], out["upper"]) == ("523777/206215591", "16/9")
    out = call_json("hodge", "--d", "1", "--method", "theta")
    assert (out["C"], out["a"]) == ("150", {"1": "56"})
    assert call_json("generators", "lambda_2d", "--d", "4", "--flavor", "P")["count"] == 5


def test_other_subcommands():
    info = call_json("lattice", "info", "E6")
    assert info["det"] == "3" and info["discriminant"]["q"]["[1]"] == "2/3"
    th = call_json("theta", "E7", "--max-m", "1")
    assert {"c": "56", "m": "3/4", "mu": [1]} in th["entries"]
    eis = call_json("eisenstein", "lambda_2d", "--d", "3", "--weight", "21/2", "--indices", "1/3@[2];7/3@[2]")
    assert [c["c"] for c in eis["coefficients"]] == ["-523777/206215591", "-55921251768096/206215591"]
    rel = call_json("relation", "lambda_cubic", "--N", "1", "--source", "eisenstein", "--check")
    assert rel["lambda"] == "-96" and rel["pairing"] == "0"
    b = call_json("bounds", "--g", "2", "--k", "21/2")
    assert b["C"][1] == {"C": "263/240", "closed_form": "113/60", "i": 2}
    b = call_json("bounds", "--g", "1", "--k", "21/2", "--lattice", "lambda_2d", "--d", "1")
    assert len(b["S"]) == 2
    pc = call_json("pairing-check", "lambda_2d", "--d", "2", "--N", "1")
    assert pc["all_zero"]


def test_inline_and_file_lattices(tmp_path):
    gram = {"gram": [[2, -1], [-1, 2]]}
    assert call_json("lattice", "info", json.dumps(gram))["det"] == "3"
    f = tmp_path / "a2.json"
    f.write_text(json.dumps(gram))
    assert call_json("lattice", "info", str(f))["level"] == 3
    assert load_lattice("E8(-1)").gram[0][0] == -2


def test_parse_indices():
    assert parse_indices("1/3@[2];4/3@[2]") == [(Fraction(1, 3), (2,)), (Fraction(4, 3), (2,))]
    assert parse_indices('[["1/4", [1]]]') == [(Fraction(1, 4), (1,))]
    with pytest.raises(BadInput):
        parse_indices("1/3")


@pytest.mark.parametrize(
    "argv,code,err",
    [
        (["frobnicate"], 2, "BadInput"),
        (["lattice", "info", "F4"], 2, "UnknownName"),
        (["theta", "E8", "--max-m", "400"], 3, "EnumerationBudgetExceeded"),
        (["theta", "lambda_2d", "--d", "1", "--max-m", "1"], 4, "IndefiniteLattice"),
        (["generators", "k3_weight_seven_halves", "--d", "1"], 4, "HypothesisNotSatisfied"),
        (["bounds", "--g", "4", "--k", "10"], 2, "MissingSlopeEntry"),
    ],
)
def test_exit_codes(argv, code, err):
    got, text = call(*argv)
    assert got == code
    obj = json.loads(text)["error"]
    assert obj["code"] == err
    assert set(obj) == {"code", "message", "module"}


def test_cache_hit_and_no_cache_are_identical(tmp_path, monkeypatch):
    monkeypatch.setenv("NLCYCLES_CACHE", str(tmp_path / "c"))
    argv = ["eisenstein", "lambda_2d", "--d", "3", "--weight", "21/2", "--indices", "1/3@[2]"]
    _, cold = call(*argv)
    files = list((tmp_path / "c").rglob("*.json"))
    assert files
    _, warm = call(*argv)
    _, nocache = call("--no-cache", *argv)
    assert cold == warm == nocache


def test_corrupt_cache_entry_is_repaired(tmp_path, monkeypatch, caplog):
    monkeypatch.setenv("NLCYCLES_CACHE", str(tmp_path / "c"))
    argv = ["relation", "lambda_cubic", "--source", "theta:E6"]
    _, first = call(*argv)
    (entry,) = list((tmp_path / "c").rglob("*.json"))
    data = json.loads(entry.read_text())
    data["payload"]["lambda"] = "-95"
    entry.write_text(json.dumps(data))
    _, second = call(*argv)
    assert second == first
    assert json.loads(entry.read_text())["payload"]["lambda"] == "-96"
    entry.write_text("{not json")
    _, third = call(*argv)
    assert third == first


def test_cache_roundtrip(tmp_path):
    c = Cache(tmp_path)
    k = Cache.key("m", "h", {"a": 1})
    assert c.get(k) is None
    c.put(k, {"x": "1/2"})
    assert c.get(k) == {"x": "1/2"}
    assert Cache(tmp_path, enabled=False).get(k) is None
    assert Cache.key("m", "h", {"a": 1}) != Cache.key("m", "h", {"a": 2})


def test_manifest(tmp_path):
    m = tmp_path / "run.json"
    code, text = call("--manifest", str(m), "lattice", "info", "E7")
    assert code == 0
    man = json.loads(m.read_text())
    assert man["command"] == "lattice"
    assert man["lattice_hash"] == load_lattice("E7").digest()
    import hashlib

    assert man["output_digest"] == hashlib.sha256(text.rstrip("\n").encode()).hexdigest()
    assert "config_versions" in man


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "nlcycles", "--quiet", "lattice", "info", "A2"],
        capture_output=True,
        text=True,
        env={**os.environ},
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rank"] == 2
    proc = subprocess.run([sys.executable, "-m", "nlcycles", "nope"], capture_output=True, text=True)
    assert proc.returncode == 2
