import pytest

from conftest import find_run, make_config
from kbp_commit.errors import HorizonExceeded
from kbp_commit.generation.generator import (
    byzantine_behaviours,
    enumerate_choices,
    generate,
    runs_identical,
    verify_knowledge_inputs,
)
from kbp_commit.generation.system import Point, observation_history, prefix_system
from kbp_commit.protocol.types import Decision, Vote

Y, N = Vote.YES, Vote.NO


def test_two_agent_honest_system_has_one_run_per_vote_pair(honest_d2):
    assert len(honest_d2.runs) == 4
    assert {(r.choice.coord_vote, r.choice.votes) for r in honest_d2.runs} == {
        (Y, (Y,)), (Y, (N,)), (N, (Y,)), (N, (N,)),
    }


def test_run_counts(honest_d3, byzantine_d2, byzantine_d3):
    assert len(honest_d3.runs) == 16
    assert len(byzantine_d2.runs) == 40
    assert len(byzantine_d3.runs) == 144


def test_behaviours_are_deduplicated():
    assert len(byzantine_behaviours(2)) == 4
    assert len(byzantine_behaviours(3)) == 8
    assert len(byzantine_behaviours(4)) == 16


def test_choice_order_starts_with_the_all_yes_honest_run():
    choices = enumerate_choices(make_config(3, byzantine=True, trap=True))
    assert len(choices) == 144
    first = choices[0]
    assert first.coord_vote == Y and first.votes == (Y, Y)
    assert not first.byzantine and not first.trap


def test_every_run_spans_the_horizon_and_stutters(byzantine_d3):
    for run in byzantine_d3.runs:
        assert len(run.states) == byzantine_d3.horizon + 1
        assert run.quiescent_from == 9
        for m in range(run.quiescent_from, byzantine_d3.horizon):
            assert run.states[m] == run.states[m + 1]
            assert run.states[m].quiescent()


def test_honest_decision_rule(honest_d3):
    for run in honest_d3.runs:
        final = run.states[-1]
        unanimous = run.choice.coord_vote == Y and all(v == Y for v in run.choice.votes)
        assert final.env.decision == (Decision.COMMIT if unanimous else Decision.ABORT)


def test_byzantine_system_has_an_all_yes_abort_run(byzantine_d3):
    r = find_run(byzantine_d3, votes=(Y, Y), byzantine=True, sends=(Decision.ABORT, Decision.ABORT))
    assert byzantine_d3.runs[r].states[-1].env.decision == Decision.ABORT


def test_nobody_detects_cheating_in_honest_runs(honest_d3):
    for r in range(len(honest_d3.runs)):
        for m in range(honest_d3.horizon + 1):
            val = honest_d3.valuation(r, m)
            assert val["cheating"] == "false"
            assert val["cheatingDetected"] == "false"


def test_participant_cannot_see_the_other_vote_before_the_decision(honest_d3):
    a = find_run(honest_d3, votes=(Y, Y))
    b = find_run(honest_d3, votes=(Y, N))
    ra, rb = honest_d3.runs[a], honest_d3.runs[b]
    assert observation_history(ra, "2", 2) == observation_history(rb, "2", 2)
    assert honest_d3.indistinguishable(Point(a, 2), Point(b, 2), "2")
    # commit against abort arrives at round 3
    assert observation_history(ra, "2", 3) != observation_history(rb, "2", 3)
    assert not honest_d3.indistinguishable(Point(a, 3), Point(b, 3), "2")


def test_coordinator_cannot_see_the_trap(honest_d3):
    a = find_run(honest_d3, votes=(Y, N), trap=False)
    b = find_run(honest_d3, votes=(Y, N), trap=True)
    H = honest_d3.horizon
    assert honest_d3.indistinguishable(Point(a, H), Point(b, H), "c")
    assert not honest_d3.indistinguishable(Point(a, 0), Point(b, 0), "2")


def test_participant_cannot_tell_an_honest_commit_from_a_forced_one(byzantine_d3):
    a = find_run(byzantine_d3, votes=(Y, Y))
    b = find_run(byzantine_d3, votes=(Y, Y), byzantine=True, sends=(Decision.COMMIT, Decision.COMMIT))
    H = byzantine_d3.horizon
    for agent in ("2", "3"):
        assert byzantine_d3.indistinguishable(Point(a, H), Point(b, H), agent)
    assert not byzantine_d3.indistinguishable(Point(a, 0), Point(b, 0), "c")


def test_points_at_different_rounds_are_distinguishable(honest_d2):
    assert not honest_d2.indistinguishable(Point(0, 3), Point(0, 4), "2")


def test_history_value_reads_back(honest_d2):
    r = find_run(honest_d2, votes=(Y,))
    h = honest_d2.history(Point(r, 7), "2")
    assert h.round == 7 and len(h) == 8
    assert h.value("ack2") == "true"
    assert h.value("ack2", back=2) == "false"
    assert h.value("decision2", back=4) == "commit"
    assert h.value("vote2", back=8) is None
    assert h.value("cheating") is None


def test_prefix_systems(honest_d2):
    assert len(prefix_system(honest_d2, 0).runs) == 4
    assert len(prefix_system(honest_d2, 1).runs) == 4
    p = prefix_system(honest_d2, 3)
    assert p.horizon == 3
    assert all(len(run.states) == 4 for run in p.runs)


def test_prefix_drops_duplicate_prefixes(byzantine_d2):
    # every initial choice is visible in the round-0 state
    assert len(prefix_system(byzantine_d2, 0).runs) == len(byzantine_d2.runs)
    # two copies of a system collapse to one
    doubled = type(byzantine_d2)(byzantine_d2.runs * 2, byzantine_d2.d, byzantine_d2.horizon)
    assert len(prefix_system(doubled, 4).runs) == len(byzantine_d2.runs)


def test_knowledge_inputs_agree_with_the_final_system(honest_d2, byzantine_d3):
    for system in (honest_d2, byzantine_d3):
        assert system.knowledge_log
        assert verify_knowledge_inputs(system) == []


def test_generation_is_deterministic(honest_d2):
    assert runs_identical(honest_d2, generate(make_config(2)))


def test_short_horizon_is_exceeded():
    with pytest.raises(HorizonExceeded):
        generate(make_config(2, horizon=6))


@pytest.mark.parametrize("horizon", [10, 40])
def test_lossy_start_never_quiesces(horizon):
    # a participant that never got start never confirms, so the coordinator retransmits forever
    with pytest.raises(HorizonExceeded, match="never quiesce"):
        generate(make_config(2, reliable_channels=False, horizon=horizon))


def test_full_prefix_is_the_system(honest_d2):
    p = prefix_system(honest_d2, honest_d2.horizon)
    assert runs_identical(p, honest_d2)


def test_round_zero_history_is_the_initial_observation(honest_d3):
    h = observation_history(honest_d3.runs[0], "2", 0)
    assert len(h) == 1
    assert h.value("vote2") == "yes" and h.value("trap") == "false"
    assert h.value("vote3") is None
