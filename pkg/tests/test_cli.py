import json
import shutil
import subprocess
import sys

import pytest
from conftest import DATA

from comgram import __version__
from comgram.cli import RunConfig, main, run


def cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, _ = cli(capsys, *argv, "--json")
    return code, json.loads(out)


@pytest.fixture
def data(tmp_path):
    for f in DATA.iterdir():
        shutil.copy(f, tmp_path / f.name)
    return tmp_path


# --- the documented examples ---------------------------------------------------


def test_equivalence_of_a_grammar_with_itself(capsys, data):
    code, rep = report(capsys, "equivalence", data / "g.gram", data / "g.gram")
    assert code == 0 and rep["verdict"] == "holds" and rep["result"]["equivalent"]


def test_semilinear_inclusion_counterexample(capsys, data):
    code, out, _ = cli(capsys, "inclusion", data / "astar.gram", data / "aastar.gram", "--method", "semilinear")
    assert code == 1 and "counterexample: a" in out
    code, rep = report(capsys, "inclusion", data / "astar.gram", data / "aastar.gram", "--method", "semilinear")
    assert rep["result"]["counterexample"] == "a" and rep["result"]["trace"]
    assert rep["result"]["exhaustive"]


def test_compile_then_inclusion(capsys, data):
    out = data / "out"
    code, _, _ = cli(capsys, "compile-lower-bound", "--formula", data / "evenodd.sexp", "--out", out, "--c-override", 4, "--emit", "all")
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["c"] == "4" and not manifest["certified"] and manifest["j"] == 2
    assert set(manifest["files"]) == {"G", "H", "G_e", "H_e", "G_r", "H_r"}
    assert manifest["gadget_axioms"]["F_psi"] == "h.F@/"
    code, rep = report(capsys, "inclusion", out / "G.gram", out / "H.gram")
    assert code == 0 and rep["result"]["included"] and not rep["result"]["exhaustive"]


def test_compile_emits_only_requested(capsys, data):
    out = data / "cf"
    assert cli(capsys, "compile-lower-bound", "--formula", data / "evenodd.sexp", "--out", out, "--c-override", 2)[0] == 0
    assert sorted(p.name for p in out.iterdir()) == ["G.gram", "H.gram", "manifest.json"]
    code, _, err = cli(capsys, "compile-lower-bound", "--formula", data / "evenodd.sexp", "--out", out, "--c-override", 3, "--emit", "regular")
    assert code == 3 and "power of two" in err


# --- the other verbs -----------------------------------------------------------


def test_classify_and_member(capsys, data):
    code, rep = report(capsys, "classify", data / "g.gram")
    assert code == 0 and rep["result"]["primary"] == "regular"
    code, rep = report(capsys, "member", data / "aastar.gram", "a^4")
    assert code == 0 and len(rep["result"]["trace"]) == 3
    code, rep = report(capsys, "member", data / "aastar.gram", "a^3")
    assert code == 1 and rep["result"]["exhaustive"]


def test_enumerate(capsys, data):
    code, out, _ = cli(capsys, "enumerate", data / "aastar.gram", "--max-length", 4)
    assert code == 0 and out.split("\n")[:3] == ["eps", "a^2", "a^4"]
    code, rep = report(capsys, "enumerate", data / "astar.gram", "--max-length", 2, "--reach")
    assert rep["result"]["items"] == ["eps", "S", "a", "S a", "a^2", "S a^2"]


def test_equivalence_counterexample_in_second(capsys, data):
    code, rep = report(capsys, "equivalence", data / "aastar.gram", data / "astar.gram", "--max-length", 6)
    assert code == 1 and rep["result"]["backward"]["counterexample"] == "a"


def test_semilinear_verbs(capsys, tmp_path):
    sl = tmp_path / "m.json"
    sl.write_text(json.dumps({"dim": 2, "components": [{"base": ["0", "0"], "periods": [["2", "3"]]}]}))
    two = tmp_path / "n.json"
    two.write_text(json.dumps({"dim": 2, "components": [{"base": ["0", "0"], "periods": [["1", "0"], ["0", "1"]]}]}))
    assert report(capsys, "sl-member", sl, "4,6")[0] == 0
    assert report(capsys, "sl-member", sl, "[4, 5]")[0] == 1
    code, rep = report(capsys, "sl-incl", sl, two)
    assert code == 0 and not rep["result"]["exhaustive"]
    code, rep = report(capsys, "sl-incl", two, sl)
    assert code == 1 and rep["result"]["witness"] == ["0", "1"]
    code, rep = report(capsys, "huynh", two)
    assert code == 0 and rep["result"]["components"] == 1
    sys_ = tmp_path / "d.json"
    sys_.write_text(json.dumps({"A": [[-1, 2]], "c": [1]}))
    code, rep = report(capsys, "solve-dioph", sys_)
    assert rep["result"]["bases"] == [["0", "1"], ["1", "1"]]


def test_parikh_and_pnml(capsys, data, tmp_path):
    code, rep = report(capsys, "parikh", data / "g.gram")
    assert code == 0 and rep["result"]["semilinear"]["components"] == [{"base": ["0", "0"], "periods": [["1", "1"]]}]
    code, out, _ = cli(capsys, "to-pnml", data / "astar.gram")
    assert code == 0 and out.startswith("<?xml")
    code, rep = report(capsys, "to-pnml", data / "astar.gram", "--out", tmp_path / "net.pnml", "--net-id", "n1")
    assert 'id="n1"' in (tmp_path / "net.pnml").read_text()


# --- exit codes and reports ----------------------------------------------------


def test_parse_error_exits_3(capsys, tmp_path):
    bad = tmp_path / "bad.gram"
    bad.write_text("terminals a\nnonterminals S\naxiom S\nS -> S a -> b\n")
    code, out, err = cli(capsys, "classify", bad)
    assert code == 3 and "error" in err
    code, rep = report(capsys, "classify", tmp_path / "missing.gram")
    assert code == 3 and rep["verdict"] == "error" and rep["result"]["kind"] == "ParseError"


def test_usage_errors_exit_3(capsys, data):
    with pytest.raises(SystemExit) as e:
        main(["inclusion", str(data / "g.gram")])
    assert e.value.code == 3
    with pytest.raises(SystemExit) as e:
        main(["enumerate", str(data / "g.gram"), "--max-length", "0"])
    assert e.value.code == 3
    with pytest.raises(ValueError):
        RunConfig("enumerate", [], {"max_forms": -1})


def test_budget_exits_2(capsys, data, monkeypatch):
    g = data / "wide.gram"
    g.write_text("terminals a b c\nnonterminals S\naxiom S\nS -> S a | S b | S c | S^2 | eps\n")
    code, rep = report(capsys, "member", g, "a^40 b^40 c^40", "--budget-ms", 1)
    assert code == 2 and rep["verdict"] == "inconclusive"
    monkeypatch.setenv("COMGRAM_BUDGET_MS", "1")
    assert report(capsys, "member", g, "a^40 b^40 c^40")[0] == 2
    monkeypatch.setenv("COMGRAM_BUDGET_MS", "soon")
    assert report(capsys, "member", g, "a")[0] == 3


def test_report_contents(capsys, data, tmp_path):
    path = tmp_path / "r.json"
    code, rep = report(capsys, "classify", data / "g.gram", "--report", path, "--seed", 7)
    assert json.loads(path.read_text()) == rep
    assert rep["version"] == __version__ and rep["seed"] == 7 and rep["exit_code"] == code
    assert rep["inputs"][0]["path"].endswith("g.gram") and len(rep["inputs"][0]["sha256"]) == 64
    assert "timings" not in rep
    assert "timings" in report(capsys, "classify", data / "g.gram", "--timings")[1]


def test_reports_are_byte_identical(capsys, data, tmp_path):
    args = ["inclusion", data / "astar.gram", data / "aastar.gram", "--max-length", 12]
    cli(capsys, *args, "--report", tmp_path / "a.json")
    cli(capsys, *args, "--report", tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_direct_run(data):
    cfg = RunConfig("classify", [str(data / "astar.gram")], {})
    code, rep, text = run(cfg)
    assert code == 0 and text.startswith("regular")


def test_module_entry_point(data):
    r = subprocess.run([sys.executable, "-m", "comgram", "classify", str(data / "g.gram")], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("regular")
