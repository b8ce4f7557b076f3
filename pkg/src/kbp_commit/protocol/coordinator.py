from __future__ import annotations

from dataclasses import replace
from typing import List, Mapping, NamedTuple, Optional, Sequence

from kbp_commit.errors import MissingKnowledgeInput
from kbp_commit.protocol.types import (
    COORDINATOR,
    ByzantineBehaviour,
    CoordinatorState,
    Decision,
    EnvState,
    Location,
    SendRecord,
    Vote,
    participants,
)


# Rounds the coordinator waits for acknowledgements (wait(tau_k)) before its first
# retransmission test; it covers the participants' detection phase (1), open, (2), (3).
ACK_WAIT = 3


def stop_test(i: str) -> str:
    return f"stop_cond[{i}]"


def retrans_test(i: str) -> str:
    return f"retrans_cond[{i}]"


class CoordinatorStep(NamedTuple):
    state: CoordinatorState
    sends: List[SendRecord]
    decision: Optional[Decision]     # new value of the environment's decision, if it changed


def initial_coordinator(coord_vote: Vote, d: int) -> CoordinatorState:
    n = d - 1
    return CoordinatorState(
        coord_vote=coord_vote,
        vote=(Vote.UNDEF,) * n,
        ack=(False,) * n,
        pc=Location.START,
        stop_cond=(False,) * n,
        retrans_cond=(False,) * n,
    )


def honest_decision(coord_vote: Vote, votes: Sequence[Vote]) -> Decision:
    """R3: commit iff the coordinator and every participant voted yes; undef counts against."""
    if coord_vote == Vote.YES and all(v == Vote.YES for v in votes):
        return Decision.COMMIT
    return Decision.ABORT


def required_coordinator_tests(state: CoordinatorState, d: int) -> List[str]:
    if state.pc == Location.COORD_TERM_CHECK:
        return [stop_test(i) for i in participants(d)]
    if state.pc == Location.COORD_RETRANS_LOOP:
        return [retrans_test(i) for i in participants(d)]
    return []


def _lookup(knowledge_inputs: Mapping[str, bool], key: str, pc: Location) -> bool:
    try:
        return bool(knowledge_inputs[key])
    except KeyError:
        raise MissingKnowledgeInput(f"coordinator at {pc.value} needs knowledge input {key!r}") from None


def _announced_values(state: CoordinatorState, env: EnvState, byz: Optional[ByzantineBehaviour], d: int):
    if env.byzantine and byz is not None:
        return byz.sends(d)
    return (env.decision,) * (d - 1)


def coordinator_step(
    state: CoordinatorState,
    env: EnvState,
    byz: Optional[ByzantineBehaviour],
    knowledge_inputs: Mapping[str, bool],
    round: int,
) -> CoordinatorStep:
    """
    One synchronous round of the coordinator's knowledge-based program.

    knowledge_inputs maps stop_cond[i] -> K_c(dhat_i(decision)) while the coordinator is
    at its termination test, and retrans_cond[i] -> not K_c(dhat_i(decision)) at its
    retransmission test.
    """
    d = len(state.vote) + 1
    pc = state.pc

    if pc == Location.START:
        sends = [SendRecord(round, COORDINATOR, i, "start") for i in participants(d)]
        return CoordinatorStep(replace(state, pc=Location.AWAIT_VOTES), sends, None)

    if pc == Location.AWAIT_VOTES:
        return CoordinatorStep(replace(state, pc=Location.DECIDE), [], None)

    if pc == Location.DECIDE:
        if env.byzantine:
            if byz is None:
                raise ValueError("byzantine coordinator stepped without a ByzantineBehaviour")
            decision = byz.decision
            values = byz.sends(d)
        else:
            decision = honest_decision(state.coord_vote, state.vote)
            values = (decision,) * (d - 1)
        sends = [SendRecord(round, COORDINATOR, i, v.value) for i, v in zip(participants(d), values)]
        nxt = replace(state, pc=Location.COORD_TERM_CHECK, ack_wait=ACK_WAIT)
        return CoordinatorStep(nxt, sends, decision)

    if pc == Location.COORD_TERM_CHECK:
        stop = tuple(_lookup(knowledge_inputs, stop_test(i), pc) for i in participants(d))
        if all(stop):
            return CoordinatorStep(replace(state, stop_cond=stop, pc=Location.DONE), [], None)
        if state.ack_wait > 0:
            return CoordinatorStep(replace(state, stop_cond=stop, ack_wait=state.ack_wait - 1), [], None)
        return CoordinatorStep(replace(state, stop_cond=stop, pc=Location.COORD_RETRANS_LOOP), [], None)

    if pc == Location.COORD_RETRANS_LOOP:
        retrans = tuple(_lookup(knowledge_inputs, retrans_test(i), pc) for i in participants(d))
        # a Byzantine coordinator resends the value it chose for i at announcement
        values = _announced_values(state, env, byz, d)
        sends = [
            SendRecord(round, COORDINATOR, i, v.value)
            for i, v, again in zip(participants(d), values, retrans)
            if again
        ]
        nxt = replace(state, retrans_cond=retrans, pc=Location.COORD_TERM_CHECK, ack_wait=0)
        return CoordinatorStep(nxt, sends, None)

    return CoordinatorStep(state, [], None)
