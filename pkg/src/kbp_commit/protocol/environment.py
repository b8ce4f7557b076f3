from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, List, Mapping, Optional, Tuple

from kbp_commit.protocol.coordinator import coordinator_step, initial_coordinator
from kbp_commit.protocol.participant import ParticipantView, initial_participant, participant_step
from kbp_commit.protocol.types import (
    COORDINATOR,
    ByzantineBehaviour,
    CoordinatorState,
    Decision,
    EnvState,
    GlobalState,
    ParticipantState,
    SendRecord,
    Vote,
    participants,
    set_slot,
    slot,
)


@dataclass(frozen=True)
class InitialChoice:
    """Everything the environment and the agents fix nondeterministically at round 0."""
    coord_vote: Vote
    votes: Tuple[Vote, ...]
    byzantine: bool = False
    behaviour: Optional[ByzantineBehaviour] = None
    trap: bool = False
    start_delivered: Tuple[bool, ...] = ()      # empty means every start message arrives

    def delivers_start(self, agent: str) -> bool:
        return not self.start_delivered or self.start_delivered[slot(agent)]

    def describe(self) -> Dict[str, str]:
        out = {
            "coordVote": self.coord_vote.value,
            "votes": ",".join(v.value for v in self.votes),
            "byzantine": "true" if self.byzantine else "false",
            "trap": "true" if self.trap else "false",
        }
        if self.behaviour is not None:
            out["byz.choice"] = self.behaviour.decision_choice.value
            out["byz.sends"] = ",".join(v.value for v in self.behaviour.sends(len(self.votes) + 1))
        if self.start_delivered:
            out["startDelivered"] = ",".join("true" if x else "false" for x in self.start_delivered)
        return out


def initial_state(choice: InitialChoice) -> GlobalState:
    d = len(choice.votes) + 1
    n = d - 1
    env = EnvState(
        byzantine=choice.byzantine,
        decision=Decision.UNDECIDED,
        rcvd_start_msg=(False,) * n,
        trap=choice.trap,
        cheating_detected=False,
        decision_channel=(Decision.UNDECIDED,) * n,
        behaviour=choice.behaviour.canonical(d) if choice.byzantine and choice.behaviour else None,
    )
    parts = tuple(initial_participant(i, v, d) for i, v in zip(participants(d), choice.votes))
    return GlobalState(env=env, coordinator=initial_coordinator(choice.coord_vote, d), participants=parts)


def _deliver(
    s: SendRecord,
    env: EnvState,
    coord: CoordinatorState,
    parts: Dict[str, ParticipantState],
    choice: InitialChoice,
) -> Tuple[EnvState, CoordinatorState]:
    msg = s.message
    if s.sender == COORDINATOR:
        i = s.receiver
        if msg == "start":
            if choice.delivers_start(i):
                env = replace(env, rcvd_start_msg=set_slot(env.rcvd_start_msg, i, True))
                parts[i] = replace(parts[i], start_received=True)
            return env, coord
        value = Decision(msg)
        env = replace(env, decision_channel=set_slot(env.decision_channel, i, value))
        parts[i] = replace(parts[i], received_decision=value)
        return env, coord

    if s.receiver == COORDINATOR:
        if msg == "ack":
            return env, replace(coord, ack=set_slot(coord.ack, s.sender, True))
        _, vote = msg.split(":", 1)
        return env, replace(coord, vote=set_slot(coord.vote, s.sender, Vote(vote)))

    # open:vote:x / open:decision:x between participants
    _, kind, value = msg.split(":", 2)
    p = parts[s.receiver]
    if kind == "vote":
        p = replace(p, opened=True, opened_votes=set_slot(p.opened_votes, s.sender, Vote(value)))
    else:
        p = replace(p, opened=True, opened_decisions=set_slot(p.opened_decisions, s.sender, Decision(value)))
    parts[s.receiver] = p
    return env, coord


def advance(
    gs: GlobalState,
    choice: InitialChoice,
    knowledge_inputs: Mapping[str, Mapping[str, bool]],
    round: int,
) -> Tuple[GlobalState, List[SendRecord]]:
    """
    One lockstep round: every agent steps on the round-`round` state, then all sends
    are logged and delivered so they are visible at round + 1.
    """
    env = gs.env
    c = coordinator_step(gs.coordinator, env, env.behaviour, knowledge_inputs.get(COORDINATOR, {}), round)
    steps = [
        participant_step(p, ParticipantView.of(env, p.ident), knowledge_inputs.get(p.ident, {}), round)
        for p in gs.participants
    ]

    sends = sorted(c.sends + [s for st in steps for s in st.sends])
    new_env = env.log_sends(sends)
    if c.decision is not None:
        new_env = replace(new_env, decision=c.decision)
    if any(st.announce for st in steps):
        new_env = replace(new_env, cheating_detected=True)

    coord = c.state
    parts = {st.state.ident: st.state for st in steps}
    for s in sends:
        new_env, coord = _deliver(s, new_env, coord, parts, choice)

    nxt = GlobalState(
        env=new_env,
        coordinator=coord,
        participants=tuple(parts[i] for i in participants(gs.d)),
    )
    return nxt, sends
