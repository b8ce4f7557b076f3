import pytest

from kbp_commit.analysis.bounds import (
    bounds,
    communication_rounds,
    count_messages,
    eq_all_terminated,
    eq_never_terminated,
    find_longest,
    find_shortest,
    vote_round,
)
from kbp_commit.analysis.report import bounds_record, render_table, render_table2, render_table3, verdict_record
from kbp_commit.analysis.specs import SpecId, follow_rounds, spec_formula
from kbp_commit.analysis.suite import (
    EXPECTED_BYZANTINE_ROW,
    EXPECTED_HONEST_ROW,
    check_requirements,
    conservative_guard_report,
    row_matches,
    run_table2,
)
from kbp_commit.logic.checker import check, trace_of
from kbp_commit.logic.formula import pretty
from kbp_commit.protocol.types import Decision, Vote

Y, N = Vote.YES, Vote.NO


def _row(verdicts):
    return {s: v.holds for s, v in verdicts.items()}


def test_specification_formulas():
    assert pretty(spec_formula(SpecId.S4A, 2)) == "F K[c] K[2] (confirmed2=commit | confirmed2=abort)"
    assert pretty(spec_formula(SpecId.S3, 2)) == "X^6 (cheating => K[2] cheating)"
    assert pretty(spec_formula(SpecId.S3, 3, [6, 7])).count("X^") == 4
    assert pretty(spec_formula(SpecId.S1B, 2)) == "F (outcome2=commit | outcome2=abort)"
    # the coordinator's outcome is its decision
    assert "decision=abort & outcome2=commit" in pretty(spec_formula(SpecId.S1A, 2))


def test_participants_follow_at_round_six(byzantine_d3):
    assert list(follow_rounds(byzantine_d3)) == [6]


@pytest.mark.parametrize("fixture", ["byzantine_d2", "byzantine_d3"])
def test_byzantine_row(request, fixture):
    row = run_table2(request.getfixturevalue(fixture))
    assert _row(row) == EXPECTED_BYZANTINE_ROW
    assert row_matches(row, EXPECTED_BYZANTINE_ROW)


@pytest.mark.parametrize("fixture", ["honest_d2", "honest_d3"])
def test_honest_row(request, fixture):
    row = run_table2(request.getfixturevalue(fixture))
    assert _row(row) == EXPECTED_HONEST_ROW
    assert not row_matches(row, EXPECTED_BYZANTINE_ROW)


def test_parallel_checks_agree(byzantine_d3):
    assert _row(run_table2(byzantine_d3, jobs=4)) == EXPECTED_BYZANTINE_ROW


def test_undetected_cheat_is_a_consistent_abort(byzantine_d3):
    v = run_table2(byzantine_d3)[SpecId.S3]
    choice = v.counterexample.choice
    assert choice.byzantine and choice.coord_vote == Y and choice.votes == (Y, Y)
    assert choice.behaviour.sends(3) == (Decision.ABORT, Decision.ABORT)
    final = v.counterexample.states[-1]
    assert final.env.decision == Decision.ABORT
    assert not final.env.cheating_detected
    assert v.violation.round == 6


def test_forced_commit_breaks_abort_validity(byzantine_d3):
    v = run_table2(byzantine_d3)[SpecId.S2B]
    choice = v.counterexample.choice
    assert choice.byzantine and choice.behaviour.decision == Decision.COMMIT
    assert N in choice.votes or choice.coord_vote == N


def test_requirements(honest_d3, byzantine_d3):
    assert all(v.holds for v in check_requirements(honest_d3).values())
    byz = check_requirements(byzantine_d3)
    assert not byz["agreement"].holds
    assert byz["irreversibility"].holds


def test_conservative_guard_never_commits(byzantine_d3, honest_d3):
    report = conservative_guard_report(byzantine_d3)
    assert report.points_checked > 0
    assert report.guard_true == 0 and report.never_commits
    assert set(report.by_agent) == {"2", "3"}
    # with an honest coordinator the guard is true wherever it is asked
    honest = conservative_guard_report(honest_d3)
    assert honest.guard_true == honest.points_checked > 0
    assert not honest.never_commits


def test_message_counting(honest_d2):
    trace = trace_of(honest_d2, 0)
    assert vote_round(trace) == 1
    assert count_messages(trace, range(0, 1)) == 1
    assert count_messages(trace, range(1, 7)) == 3
    assert communication_rounds(trace, range(1, 7)) == 3


@pytest.mark.parametrize("fixture,d", [("honest_d2", 2), ("byzantine_d3", 3)])
def test_termination_bounds(request, fixture, d):
    b = bounds(request.getfixturevalue(fixture))
    assert (b.shortest_k, b.longest_w) == (2, 7)
    assert b.shortest_messages == d - 1 and b.shortest_rounds == 1
    assert b.longest_messages == 3 * (d - 1) and b.longest_rounds == 3
    assert all(v == N for v in b.shortest_witness.choice.votes)
    assert b.longest_witness.run == 0


def test_bound_search_steps(byzantine_d3):
    b = bounds(byzantine_d3)
    assert b.shortest_steps == [(1, True), (2, False)]
    assert b.longest_steps == [(1, False), (2, False), (4, False), (8, True), (6, False), (7, True)]


@pytest.mark.parametrize("fixture", ["honest_d2", "byzantine_d2", "honest_d3", "byzantine_d3"])
def test_bounds_are_tight_on_every_side(request, fixture):
    system = request.getfixturevalue(fixture)
    k, _ = find_shortest(system)
    w, _ = find_longest(system)
    for n in range(k):
        assert check(system, eq_never_terminated(system.d, n)).holds, n
    for n in range(k, system.horizon + 1):
        assert not check(system, eq_never_terminated(system.d, n)).holds, n
    for n in range(w):
        assert not check(system, eq_all_terminated(system.d, n)).holds, n
    for n in range(w, system.horizon + 1):
        assert check(system, eq_all_terminated(system.d, n)).holds, n


def test_render_table_is_aligned_and_stable():
    text = render_table(["a", "long header"], [["x", 1], ["yy", None], ["z"]])
    assert text.splitlines() == [
        "a   long header",
        "--  -----------",
        "x   1",
        "yy",
        "z",
    ]
    assert text == render_table(["a", "long header"], [["x", 1], ["yy", None], ["z"]])


def test_render_table2(byzantine_d2):
    text = render_table2({"byzantine d=2": run_table2(byzantine_d2)})
    header, _, line = text.splitlines()
    assert header.split() == ["context", "1a", "1b", "2a", "2b", "3", "4a", "4b"]
    assert line.split()[2:] == ["fails", "holds", "fails", "fails", "fails", "holds", "holds"]


def test_records(honest_d2):
    b = bounds(honest_d2)
    rec = bounds_record(b)
    assert rec["shortest"]["n"] == 2 and rec["longest"]["messages"] == 3
    assert "7" in render_table3({"honest d=2": b})
    v = run_table2(honest_d2)[SpecId.S1A]
    assert verdict_record(v) == {"holds": True, "formula": v.formula}


def test_empty_range_counts_nothing(honest_d2):
    assert count_messages(trace_of(honest_d2, 0), range(3, 3)) == 0


def test_byzantine_behaviour_does_not_delay_termination(honest_d2, byzantine_d2):
    honest, byz = bounds(honest_d2), bounds(byzantine_d2)
    assert honest.shortest_k == byz.shortest_k <= byz.longest_w == honest.longest_w
