import csv
import io
import json

import pytest

from verba import cli


def run(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), stdout=out)
    return code, out.getvalue()


def doc(*argv):
    code, text = run(*argv)
    return code, json.loads(text) if text else None


@pytest.mark.parametrize("argv,code", [
    (["image", "--group", "PSL2/7", "--word", "[x,y]"], 0),
    (["image", "--group", "PSL2/7", "--word", "x^42 y^42"], 1),
    (["cover", "--group", "PSL2/7", "--word", "x^2", "--arity", "1"], 0),
    (["census", "--group", "PSL2/5", "--word", "[x,y]"], 0),
    (["equidist", "--group", "PSL2/7", "--word", "[x,y]"], 0),
    (["trace-census", "--q", "5", "--word", "[x,y]", "--compare"], 0),
    (["trace-compile", "--word", "[x,y]"], 0),
    (["goodness", "--group", "PSL2/5", "--law", "u", "--pinned", "1", "2"], 0),
    (["trace-goodness", "--q", "11", "--law", "s"], 0),
    (["torus-cert", "--endo", "x^2", "--endo", "y^2", "--w", "x", "--a", "1", "--q", "3", "5"], 0),
    (["suzuki"], 0),
    (["ore", "--group", "PSL2/7"], 0),
    (["thompson", "--group", "PSL2/7"], 0),
    (["gm", "--group", "PSL2/7", "--coprime6"], 1),
    (["engel-curve", "--n", "1", "--q", "5"], 0),
    (["minus-id", "--a", "4", "--b", "4", "--q", "3"], 1),
    (["minus-id", "--a", "1", "--b", "1", "--q", "5"], 0),
    (["bounds", "weil", "10", "12", "0"], 0),
    (["bounds", "gl", "3", "25"], 0),
    (["witten", "--group", "PSL2/7"], 0),
])
def test_exit_codes(argv, code):
    got, text = run(*argv)
    assert got == code
    d = json.loads(text)
    for key in ("artifact_version", "command", "group", "word", "per_class", "image_size",
                "epsilon_star", "l1", "timing_ms", "seed", "result"):
        assert key in d
    assert d["command"] == argv[0]


@pytest.mark.parametrize("argv", [
    ["image", "--group", "PSL2/6", "--word", "[x,y]"],
    ["image", "--group", "PSL2/7", "--word", "[x,y"],
    ["image", "--group", "GL2/7", "--word", "x"],
    ["minus-id", "--a", "1", "--b", "1", "--q", "4"],
    ["bounds", "weil", "1", "2"],
    ["goodness", "--group", "PSL2/5", "--law", "nope"],
    ["goodness", "--group", "PSL2/5", "--law-file", "/nonexistent/law.txt"],
    ["nosuchcommand"],
])
def test_input_errors(argv):
    assert run(*argv)[0] == cli.INPUT_ERROR


def test_budget_exit():
    assert run("census", "--group", "PSL2/7", "--word", "[x,y]", "--budget", "10")[0] == cli.BUDGET
    assert run("image", "--group", "SL2/101", "--word", "x")[0] == cli.BUDGET
    assert run("suzuki", "--m", "2", "--budget", "10")[0] == cli.BUDGET
    assert run("goodness", "--group", "PSL2/5", "--pinned", "1", "2", "--budget", "1")[0] \
        == cli.BUDGET


def test_reports_reproducible_except_timing():
    argv = ["goodness", "--group", "PSL2/7", "--law", "u", "--workers", "2"]
    _, a = doc(*argv)
    _, b = doc(*argv)
    a.pop("timing_ms")
    b.pop("timing_ms")
    assert a == b


def test_fibretable_cache_roundtrip(tmp_path):
    argv = ["fibretable", "--q", "5", "--cache", str(tmp_path), "--format", "csv"]
    c1, t1 = run(*argv)
    files = list(tmp_path.iterdir())
    assert c1 == 0 and len(files) == 1
    c2, t2 = run(*argv)
    assert c2 == 0 and t1 == t2
    rows = list(csv.DictReader(io.StringIO(t1)))
    assert len(rows) == 125 and sum(int(r["count"]) for r in rows) == 120**2


def test_malformed_cache(tmp_path):
    run("fibretable", "--q", "4", "--cache", str(tmp_path))
    path = next(tmp_path.iterdir())
    path.write_text("garbage\n")
    assert run("fibretable", "--q", "4", "--cache", str(tmp_path))[0] == cli.INPUT_ERROR


def test_cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
    assert run("fibretable", "--q", "3")[0] == 0
    assert len(list(tmp_path.iterdir())) == 1


def test_law_file(tmp_path):
    p = tmp_path / "s.law"
    p.write_text("first: x\nlaw: [y z y^-1, z^-1]\n")
    code, d = doc("goodness", "--group", "PSL2/7", "--law-file", str(p))
    assert code == 0 and d["result"]["witness"] is not None


def test_formats_and_out(tmp_path):
    code, text = run("census", "--group", "PSL2/5", "--word", "[x,y]", "--format", "text")
    assert code == 0 and "per_class:" in text
    code, text = run("bounds", "gl", "3", "7", "--format", "csv")
    assert code == 0 and text.startswith("key,value")
    out = tmp_path / "r.json"
    code, text = run("trace-compile", "--word", "x^2", "--out", str(out))
    assert code == 0 and text == ""
    assert json.loads(out.read_text())["result"]["poly"] == "s^2 - 2"


def test_values_in_reports():
    _, d = doc("bounds", "weil", "10", "12", "0")
    assert d["result"]["q0"] == 422 and d["result"]["operational_q0"] == 593
    _, d = doc("bounds", "gl", "3", "25")
    assert d["result"]["lo"] == d["result"]["hi"] == 720550
    _, d = doc("image", "--group", "PSL2/7", "--word", "x^2", "--arity", "1")
    assert d["image_size"] == 126
    _, d = doc("equidist", "--group", "PSL2/5", "--word", "x", "--arity", "1")
    assert d["epsilon_star"]["num"] == 0
