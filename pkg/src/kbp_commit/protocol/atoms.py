from __future__ import annotations

from typing import Dict, FrozenSet, Tuple

from kbp_commit.protocol.cheating import cheating_ground_truth
from kbp_commit.protocol.types import COORDINATOR, GlobalState, participants, slot


Observation = Tuple[Tuple[str, str], ...]


def _b(flag: bool) -> str:
    return "true" if flag else "false"


def atoms(gs: GlobalState) -> Dict[str, str]:
    """
    The interpretation pi: every state field as a name -> value pair.
    Boolean fields take "true"/"false"; an atom "name=value" holds iff the entry matches.
    """
    env, coord = gs.env, gs.coordinator
    out: Dict[str, str] = {
        "byzantine": _b(env.byzantine),
        "decision": env.decision.value,
        "trap": _b(env.trap),
        "cheatingDetected": _b(env.cheating_detected),
        "cheating": _b(cheating_ground_truth(env, coord)),
        "byz.choice": env.behaviour.decision_choice.value if env.behaviour else "none",
        "coordVote": coord.coord_vote.value,
        "c.pc": coord.pc.value,
        "c.ackWait": str(coord.ack_wait),
    }
    sends = env.behaviour.sends(gs.d) if env.behaviour else None
    for p in gs.participants:
        i, k = p.ident, slot(p.ident)
        out[f"rcvdStartMsg{i}"] = _b(env.rcvd_start_msg[k])
        out[f"decision{i}"] = env.decision_channel[k].value
        out[f"byz.send{i}"] = sends[k].value if sends else "none"
        out[f"c.vote{i}"] = coord.vote[k].value
        out[f"c.ack{i}"] = _b(coord.ack[k])
        out[f"c.stopCond{i}"] = _b(coord.stop_cond[k])
        out[f"c.retransCond{i}"] = _b(coord.retrans_cond[k])
        out[f"vote{i}"] = p.vote.value
        out[f"ack{i}"] = _b(p.ack)
        out[f"outcome{i}"] = p.outcome.value
        out[f"pc{i}"] = p.pc.value
        out[f"startReceived{i}"] = _b(p.start_received)
        out[f"confirmed{i}"] = p.confirmed.value
        out[f"opened{i}"] = _b(p.opened)
        for j in participants(gs.d):
            if j == i:
                continue
            out[f"opened{i}.vote{j}"] = p.opened_votes[slot(j)].value
            out[f"opened{i}.decision{j}"] = p.opened_decisions[slot(j)].value
    return out


def observable_names(agent: str, d: int) -> FrozenSet[str]:
    """
    Atom names an agent can observe. trap and cheatingDetected are participant-only,
    byzantine (and the chosen misbehaviour) coordinator-only; cheating is nobody's.
    """
    if agent == COORDINATOR:
        names = {"byzantine", "decision", "byz.choice", "coordVote", "c.pc", "c.ackWait"}
        for i in participants(d):
            names |= {f"byz.send{i}", f"c.vote{i}", f"c.ack{i}", f"c.stopCond{i}", f"c.retransCond{i}"}
        return frozenset(names)

    i = agent
    names = {
        "trap", "cheatingDetected", f"rcvdStartMsg{i}", f"decision{i}",
        f"vote{i}", f"ack{i}", f"outcome{i}", f"pc{i}", f"startReceived{i}",
        f"confirmed{i}", f"opened{i}",
    }
    for j in participants(d):
        if j != i:
            names |= {f"opened{i}.vote{j}", f"opened{i}.decision{j}"}
    return frozenset(names)


def observation(valuation: Dict[str, str], visible: FrozenSet[str]) -> Observation:
    """One round's observation record: the visible slice of a valuation, in a fixed order."""
    return tuple(sorted((k, v) for k, v in valuation.items() if k in visible))
