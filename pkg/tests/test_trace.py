from kbp_commit.generation.trace import export_system, write_verdict_trace
from kbp_commit.logic.checker import check
from kbp_commit.logic.parser import parse


def _fields(line):
    return dict(tok.split("=", 1) for tok in line.split())


def _read(path):
    text = path.read_text(encoding="utf-8").splitlines()
    comments = [ln[1:].strip() for ln in text if ln.startswith("#")]
    points = [_fields(ln) for ln in text if ln and not ln.startswith("#")]
    return comments, points


def test_export_writes_every_point(honest_d2, tmp_path):
    path = tmp_path / "system.trace"
    n = export_system(honest_d2, path)
    assert n == len(honest_d2.runs) * (honest_d2.horizon + 1)
    comments, points = _read(path)
    assert len(points) == n
    assert comments == []


def test_trace_lines_carry_state_and_deliveries(honest_d2, tmp_path):
    path = tmp_path / "system.trace"
    export_system(honest_d2, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("run=0 round=0 ")
    run0 = [p for p in _read(path)[1] if p["run"] == "0"]
    assert [int(p["round"]) for p in run0] == list(range(honest_d2.horizon + 1))
    assert run0[0]["delivered"] == "-"
    assert run0[1]["delivered"] == "c>2:start"
    assert run0[2]["delivered"] == "2>c:vote:yes"
    assert run0[3]["decision2"] == "commit"
    assert run0[7]["c.ack2"] == "true"
    assert "cheating" in run0[0]


def test_keys_after_run_and_round_are_sorted(honest_d2, tmp_path):
    path = tmp_path / "system.trace"
    export_system(honest_d2, path)
    keys = [tok.split("=", 1)[0] for tok in path.read_text(encoding="utf-8").splitlines()[0].split()]
    assert keys[:2] == ["run", "round"]
    assert keys[2:] == sorted(keys[2:])


def test_export_is_byte_stable(honest_d2, tmp_path):
    export_system(honest_d2, tmp_path / "a.trace")
    export_system(honest_d2, tmp_path / "b.trace")
    assert (tmp_path / "a.trace").read_bytes() == (tmp_path / "b.trace").read_bytes()


def test_verdict_trace(byzantine_d2, tmp_path):
    v = check(byzantine_d2, parse("X^6 (cheating => K[2] cheating)"))
    path = tmp_path / "spec-3.trace"
    write_verdict_trace(v, path, ["reason example"])
    first = path.read_text(encoding="utf-8").splitlines()[0]
    assert first == f"# verdict=fails formula={v.formula}"
    comments, points = _read(path)
    assert comments[1] == "reason example"
    assert f"violation run={v.violation.run} round=6" in comments
    assert any(c.startswith("witness run=") for c in comments)
    assert {p["run"] for p in points} == {str(v.counterexample.run)}


def test_holding_verdict_has_no_lines(honest_d2, tmp_path):
    path = tmp_path / "ok.trace"
    write_verdict_trace(check(honest_d2, parse("G !cheating")), path)
    comments, points = _read(path)
    assert comments == ["verdict=holds formula=G !cheating"]
    assert points == []
