from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Mapping, NamedTuple

from kbp_commit.errors import MissingKnowledgeInput
from kbp_commit.protocol.types import (
    COORDINATOR,
    Decision,
    EnvState,
    Location,
    ParticipantState,
    SendRecord,
    Vote,
    participants,
    slot,
)


CHEAT_1 = "cheat@1"             # K_i(cheating_c) at (1)
CHEAT_2 = "cheat@2"             # K_i(cheating_c) at (2)
NO_CHEAT_3 = "nocheat@3"        # not K_i(cheating_c) at (3)
RETRANS = "retrans_cond"        # not K_i(K_c(dhat_i(decision)))
STOP = "stop_cond"              # K_i(K_c(dhat_i(decision)))

_TESTS_AT = {
    Location.CHEAT_CHECK_1: [CHEAT_1],
    Location.DECIDE_ABORT_2: [CHEAT_2],
    Location.FOLLOW_DECISION_3: [NO_CHEAT_3],
    Location.RETRANS_LOOP: [RETRANS],
    Location.TERM_CHECK: [STOP],
}


@dataclass(frozen=True)
class ParticipantView:
    """The slice of the environment a participant observes."""
    trap: bool
    cheating_detected: bool
    rcvd_start_msg: bool
    decision: Decision          # decision[i], the value delivered on i's channel

    @classmethod
    def of(cls, env: EnvState, agent: str) -> "ParticipantView":
        k = slot(agent)
        return cls(
            trap=env.trap,
            cheating_detected=env.cheating_detected,
            rcvd_start_msg=env.rcvd_start_msg[k],
            decision=env.decision_channel[k],
        )


class ParticipantStep(NamedTuple):
    state: ParticipantState
    sends: List[SendRecord]
    announce: bool              # publish cheatingDetected := true


def initial_participant(agent: str, vote: Vote, d: int) -> ParticipantState:
    n = d - 1
    return ParticipantState(
        ident=agent,
        vote=vote,
        opened_votes=(Vote.UNDEF,) * n,
        opened_decisions=(Decision.UNDECIDED,) * n,
    )


def required_participant_tests(state: ParticipantState) -> List[str]:
    return list(_TESTS_AT.get(state.pc, []))


def _lookup(knowledge_inputs: Mapping[str, bool], key: str, state: ParticipantState) -> bool:
    try:
        return bool(knowledge_inputs[key])
    except KeyError:
        raise MissingKnowledgeInput(
            f"participant {state.ident} at {state.pc.value} needs knowledge input {key!r}"
        ) from None


def open_2pc_run(state: ParticipantState, d: int, round: int) -> List[SendRecord]:
    """Open the run: send own vote and received decision to every other participant."""
    sends: List[SendRecord] = []
    for j in participants(d):
        if j == state.ident:
            continue
        sends.append(SendRecord(round, state.ident, j, f"open:vote:{state.vote.value}"))
        sends.append(SendRecord(round, state.ident, j, f"open:decision:{state.received_decision.value}"))
    return sends


def participant_step(
    state: ParticipantState,
    view: ParticipantView,
    knowledge_inputs: Mapping[str, bool],
    round: int,
) -> ParticipantStep:
    """One synchronous round of participant i's knowledge-based program."""
    d = len(state.opened_votes) + 1
    pc = state.pc
    me = state.ident

    if pc == Location.AWAIT_START:
        return ParticipantStep(replace(state, pc=Location.VOTE), [], False)

    if pc == Location.VOTE:
        if not state.start_received:
            return ParticipantStep(replace(state, pc=Location.DONE), [], False)
        sends = [SendRecord(round, me, COORDINATOR, f"vote:{state.vote.value}")]
        # a no vote settles the decision for i by abort-validity
        confirmed = Decision.ABORT if state.vote == Vote.NO else state.confirmed
        return ParticipantStep(replace(state, pc=Location.AWAIT_DECISION, confirmed=confirmed), sends, False)

    if pc == Location.AWAIT_DECISION:
        return ParticipantStep(replace(state, pc=Location.CHEAT_CHECK_1), [], False)

    if pc == Location.CHEAT_CHECK_1:
        knows = _lookup(knowledge_inputs, CHEAT_1, state)
        return ParticipantStep(replace(state, pc=Location.OPEN_RUN), [], knows)

    if pc == Location.OPEN_RUN:
        sends = open_2pc_run(state, d, round) if view.trap and not view.cheating_detected else []
        return ParticipantStep(replace(state, pc=Location.DECIDE_ABORT_2), sends, False)

    if pc == Location.DECIDE_ABORT_2:
        outcome = state.outcome
        if _lookup(knowledge_inputs, CHEAT_2, state) or state.vote == Vote.NO:
            outcome = Decision.ABORT
        return ParticipantStep(replace(state, outcome=outcome, pc=Location.FOLLOW_DECISION_3), [], False)

    if pc == Location.FOLLOW_DECISION_3:
        nxt = replace(state, pc=Location.RETRANS_LOOP)
        if _lookup(knowledge_inputs, NO_CHEAT_3, state) and state.outcome == Decision.UNDECIDED:
            nxt = replace(nxt, outcome=view.decision)
        sends: List[SendRecord] = []
        # first transmission of the acknowledgement; a no vote already told c the decision
        if state.vote == Vote.YES and view.decision != Decision.UNDECIDED:
            sends.append(SendRecord(round, me, COORDINATOR, "ack"))
            nxt = replace(nxt, ack=True, confirmed=view.decision)
        return ParticipantStep(nxt, sends, False)

    if pc == Location.RETRANS_LOOP:
        sends = []
        if _lookup(knowledge_inputs, RETRANS, state):
            sends.append(SendRecord(round, me, COORDINATOR, "ack"))
        return ParticipantStep(replace(state, pc=Location.TERM_CHECK), sends, False)

    if pc == Location.TERM_CHECK:
        if _lookup(knowledge_inputs, STOP, state):
            return ParticipantStep(replace(state, pc=Location.DONE), [], False)
        return ParticipantStep(replace(state, pc=Location.RETRANS_LOOP), [], False)

    return ParticipantStep(state, [], False)
