import json

import jsonschema
import pytest

from wprkit.cli import main, run_session
from wprkit.errors import ParseError
from wprkit.report import Report, explain, load_schema, run_script
from wprkit.session import SessionParser

WPR_SCRIPT = """\
# annihilator example
ring A = QQ[x,y] / (x*y)
ideal a = (x)
wpr J=4
"""

FLAT_SCRIPT = """\
ring A = QQ[x]
flat P=A/(x) a=(x)
"""

LIFT_SCRIPT = """\
ring A = QQ[x]
map phi = hom(A, A, [[1 - x]])
lift phi n=1 a=(x) k=4
lift hom(A, A, [[x]]) n=1 a=(x) k=2
"""

SHADOW_SCRIPT = """\
ring B = QQ[t, x1, x2, x3] / (x1*t, x2*t^2, x3*t^3)
wpr a=(t) J=3
"""

EVERYTHING = """\
ring A = QQ[x, y] / (x*y)
ring R = QQ[x]
ideal a = (x) over A
seq b = (x, y) over A
module P = A/(x)
map phi = hom(R, R, [[1 - x]])
wpr a J=3
koszul b j=2
complete M=A/(x^2) a=(x) kmax=3
lift phi n=1 a=(x) k=3
flat P=R a=(x) kmax=2 tor_depth=1
flat P=P a=a kmax=2
torsion M=A/(x^3) a=(x)
derived-complete M=R/(x^2) a=(x) J=3
derived-torsion M=R/(x^2) a=(x) J=3
compare-completion a=b b=(x^2, y^2) kmax=3
ideal c = (x) over R
complex L = koszul(c)
nakayama-derived P=L a=c r=1
base-change a=(x) vars=z J=3
"""


def write(tmp_path, text, name="s.wpr"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run_text(text, level=4, threads=1):
    return run_script(SessionParser(default_level=level).parse(text), level, threads)


# ---------------------------------------------------------------------------
# run_session examples and exit codes


def test_wpr_script_exits_zero_with_witnesses(tmp_path):
    report, code = run_session(write(tmp_path, WPR_SCRIPT))
    assert code == 0
    c = report.command("c1")
    assert c["status"] == "ok" and c["line"] == 4
    cert = c["result"]["degrees"]["-1"]
    assert cert["verdict"] == "pro-zero"
    assert cert["witnesses"] == {"1": 2, "2": 3, "3": 4}


def test_flat_script_exits_one_with_tor_witness(tmp_path):
    report, code = run_session(write(tmp_path, FLAT_SCRIPT))
    assert code == 1
    v = report.command("c1")["result"]["violation"]
    assert v["tor_degree"] == 1 and v["level"] == 0 and v["dim"] == 1


def test_empty_script(tmp_path):
    report, code = run_session(write(tmp_path, "# nothing here\n\n"))
    assert code == 0
    assert report.commands == []
    assert report.summary() == {"commands": 0, "statuses": {}, "exit_code": 0}


def test_shadow_script_is_inconclusive(tmp_path):
    report, code = run_session(write(tmp_path, SHADOW_SCRIPT))
    assert code == 2
    assert report.command("c1")["verdict"] == "inconclusive"


def test_refusal_exits_one():
    report = run_text(LIFT_SCRIPT)
    assert report.command("c1")["status"] == "ok"
    assert report.command("c2")["status"] == "refused"
    assert report.command("c2")["result"]["witness"] is not None
    assert report.exit_code == 1


def test_exit_code_precedence():
    def rep(*statuses):
        return Report([{"status": s} for s in statuses])

    assert rep().exit_code == 0
    assert rep("ok", "inconclusive").exit_code == 2
    assert rep("inconclusive", "violation").exit_code == 1
    assert rep("inconclusive", "refused").exit_code == 1
    assert rep("violation", "error").exit_code == 64


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("ring A = QQ[x]\nideal a = (x\n", 2, 11),
        ("ring A = QQ[x]\nwpr a=(x) J=four\n", 2, None),
        ("ring A = QQ[x]\nwpr a=(x) K=4\n", 2, None),
        ("ring A = QQ[x]\nideal a = (q)\n", 2, None),
        ("ring A = QQ[x]\nbogus thing\n", 2, None),
    ],
)
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as err:
        SessionParser().parse(text)
    assert err.value.line == line
    if col is not None:
        assert err.value.position + 1 == col
    assert f"line {line}" in str(err.value)


def test_duplicate_names_rejected():
    with pytest.raises(ParseError):
        SessionParser().parse("ring A = QQ[x]\nring A = QQ[y]\n")


# ---------------------------------------------------------------------------
# explain


def test_explain_pro_zero_lines():
    text = explain(run_text(WPR_SCRIPT), "c1")
    assert "  level 2→1: composite = 0 (verified)" in text.splitlines()
    assert "uniform offset 1" in text


def test_explain_inconclusive_states_bound():
    text = explain(run_text(SHADOW_SCRIPT), "c1")
    assert "no certificate within bound J = 3" in text
    assert "smallest unwitnessed j0 = 1" in text
    assert "composite = 0" not in text
    assert "not weakly" not in text


def test_explain_lift_prints_corrections_and_residuals():
    text = explain(run_text(LIFT_SCRIPT), "c1")
    expected = ["1", "x", "x^2", "x^3", "x^4"]
    for i, m in enumerate(expected):
        assert f"  m_{i} = ({m})" in text
        assert f"  residual after m_{i}: (x^{i + 1}) in a^{i + 1} N (verified)".replace("(x^1)", "(x)") in text
    assert "lift = (x^4 + x^3 + x^2 + x + 1)" in text


def test_explain_flat_violation():
    text = explain(run_text(FLAT_SCRIPT), "c1")
    assert "violation:" in text and '"tor_degree": 1' in text


def test_explain_detects_tampered_evidence():
    d = json.loads(run_text(WPR_SCRIPT).dumps())
    ev = d["commands"][0]["result"]["degrees"]["-1"]["evidence"]
    zero = next(e for e in ev if e["claim"] == "zero")
    zero["matrix"] = [["1" for _ in row] for row in zero["matrix"]] or [["1"]]
    assert "FAILED replay" in explain(d, "c1")


def test_explain_unknown_id():
    with pytest.raises(KeyError):
        explain(run_text(WPR_SCRIPT), "c7")


# ---------------------------------------------------------------------------
# reports


@pytest.fixture(scope="module")
def everything():
    return run_text(EVERYTHING, level=3)


def test_every_command_runs(everything):
    statuses = {c["command"]: c["status"] for c in everything.commands}
    assert "error" not in statuses.values()
    assert len(everything.commands) == 12
    # the flat check on A/(x) over Q[x,y]/(xy) witnesses a violation, which outranks inconclusive
    assert everything.exit_code == 1


def test_report_is_schema_valid(everything):
    schema = load_schema()
    jsonschema.Draft202012Validator.check_schema(schema)
    for timings in (True, False):
        jsonschema.validate(json.loads(everything.dumps(timings)), schema)


def test_schema_rejects_malformed_report(everything):
    d = json.loads(everything.dumps())
    del d["commands"][0]["status"]
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(d, load_schema())


def test_report_round_trip(everything):
    text = everything.dumps()
    back = Report.loads(text)
    assert back == everything
    assert back.dumps() == text


def test_deterministic_across_runs_and_threads():
    texts = {run_text(EVERYTHING, 3, threads).dumps(timings=False) for threads in (1, 1, 4)}
    assert len(texts) == 1
    assert "timing_ms" not in texts.pop()


def test_ids_and_lines_follow_script_order(everything):
    assert [c["id"] for c in everything.commands] == [f"c{i}" for i in range(1, 13)]
    lines = [c["line"] for c in everything.commands]
    assert lines == sorted(lines)


# ---------------------------------------------------------------------------
# main()


def test_main_writes_json_and_explains(tmp_path, capsys):
    script = write(tmp_path, WPR_SCRIPT)
    out = tmp_path / "r.json"
    assert main(["run", script, "--json", str(out), "--no-timings"]) == 0
    human = capsys.readouterr().out
    assert "[c1] line 4: wpr -> ok" in human
    data = json.loads(out.read_text())
    jsonschema.validate(data, load_schema())
    assert main(["explain", str(out), "c1"]) == 0
    assert "level 2→1: composite = 0 (verified)" in capsys.readouterr().out


def test_main_shorthand_and_byte_identical_files(tmp_path):
    script = write(tmp_path, EVERYTHING)
    outs = []
    for i, threads in enumerate(("1", "3")):
        p = tmp_path / f"r{i}.json"
        main([script, "--json", str(p), "--no-timings", "--max-level", "3", "--threads", threads, "--quiet"])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_main_json_to_stdout(tmp_path, capsys):
    assert main(["run", write(tmp_path, FLAT_SCRIPT), "--json", "-"]) == 1
    data = json.loads(capsys.readouterr().out)
    assert data["summary"]["exit_code"] == 1


def test_main_parse_error_exit(tmp_path, capsys):
    assert main(["run", write(tmp_path, "ring A = QQ[x]\nideal a = (x\n")]) == 64
    assert "line 2, column 11" in capsys.readouterr().err


def test_main_field_and_order(tmp_path, capsys):
    script = write(tmp_path, "ring A = [x, y] / (x*y)\nwpr a=(x, y) J=3\n")
    assert main(["run", script, "--field", "Fp:7", "--order", "lex", "--json", "-"]) == 0
    data = json.loads(capsys.readouterr().out)
    ring = data["commands"][0]["result"]["degrees"]["-1"]["ring"]
    assert "7" in json.dumps(ring)
    assert "lex" in json.dumps(ring)


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["run"],
        ["run", "x.wpr", "--order", "weird"],
        ["run", "x.wpr", "--max-level", "0"],
        ["run", "x.wpr", "--threads", "0"],
        ["run", "/nonexistent/script.wpr"],
        ["run", "x.wpr", "--field", "Fp:8"],
        ["explain", "/nonexistent/report.json", "c1"],
    ],
)
def test_usage_errors_exit_64(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "x.wpr").write_text(WPR_SCRIPT)
    try:
        code = main(argv)
    except SystemExit as e:
        code = e.code
    assert code == 64


def test_explain_unknown_id_exit(tmp_path):
    out = tmp_path / "r.json"
    main(["run", write(tmp_path, WPR_SCRIPT), "--json", str(out), "--quiet"])
    assert main(["explain", str(out), "c99"]) == 64


def test_cache_directory_from_environment(tmp_path, monkeypatch):
    from wprkit import groebner

    cache = tmp_path / "cache"
    cache.mkdir()
    monkeypatch.setenv(groebner.CACHE_ENV, str(cache))
    assert groebner.CACHE_ENV == "WPRKIT_CACHE_DIR"
    groebner.CACHE.clear()  # earlier tests leave the in-memory memo warm
    first, _ = run_session(write(tmp_path, WPR_SCRIPT))
    assert any(cache.iterdir())
    groebner.CACHE.clear()
    second, _ = run_session(write(tmp_path, WPR_SCRIPT))
    assert groebner.CACHE.hits > 0 and groebner.CACHE.misses == 0
    assert first.dumps(timings=False) == second.dumps(timings=False)
