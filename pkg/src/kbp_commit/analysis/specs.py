from __future__ import annotations

from enum import Enum
from typing import Dict, Optional, Sequence

from kbp_commit.logic.formula import (
    And,
    Atom,
    Finally,
    Formula,
    Globally,
    Implies,
    Knows,
    Not,
    PowerNext,
    conj,
    dhat,
    disj,
)
from kbp_commit.protocol.types import COORDINATOR, Location, agents, participants

# round at which a participant reaches location (3) under the reliable schedule
DEFAULT_FOLLOW_ROUNDS = (6,)


class SpecId(str, Enum):
    S1A = "1a"
    S1B = "1b"
    S2A = "2a"
    S2B = "2b"
    S3 = "3"
    S4A = "4a"
    S4B = "4b"


def outcome_atom(agent: str, value: str) -> Atom:
    """The coordinator's outcome is its decision."""
    return Atom("decision", value) if agent == COORDINATOR else Atom(f"outcome{agent}", value)


def termination(d: int) -> Formula:
    """The coordinator knows every participant knows the decision."""
    return conj(Knows(COORDINATOR, dhat(i)) for i in participants(d))


def spec_formula(spec: SpecId, d: int, follow_rounds: Optional[Sequence[int]] = None) -> Formula:
    """
    The formula for one specification at d agents. follow_rounds are the rounds at which
    participants reach location (3); the cheating-detection check is made there.
    """
    ps = participants(d)

    if spec == SpecId.S1A:
        clash = disj(
            And(outcome_atom(i, "abort"), outcome_atom(j, "commit"))
            for i in agents(d) for j in agents(d) if i != j
        )
        return Globally(Not(clash))

    if spec == SpecId.S1B:
        return Finally(conj(disj([Atom(f"outcome{i}", "commit"), Atom(f"outcome{i}", "abort")]) for i in ps))

    if spec == SpecId.S2A:
        all_yes = And(conj(Atom(f"vote{i}", "yes") for i in ps), Atom("coordVote", "yes"))
        return Globally(Implies(all_yes, Finally(Atom("decision", "commit"))))

    if spec == SpecId.S2B:
        some_no = disj([Atom(f"vote{i}", "no") for i in ps] + [Atom("coordVote", "no")])
        return Globally(Implies(some_no, Finally(Atom("decision", "abort"))))

    if spec == SpecId.S3:
        rounds = tuple(follow_rounds) if follow_rounds else DEFAULT_FOLLOW_ROUNDS
        cheating = Atom("cheating")
        return conj(PowerNext(f, Implies(cheating, Knows(i, cheating))) for i in ps for f in rounds)

    if spec == SpecId.S4A:
        return Finally(termination(d))

    if spec == SpecId.S4B:
        return Finally(conj(Knows(i, Knows(COORDINATOR, dhat(i))) for i in ps))

    raise ValueError(f"unknown specification {spec!r}")


def follow_rounds(system) -> Sequence[int]:
    """Rounds at which some participant sits at location (3)."""
    rounds = set()
    for i in participants(system.d):
        rounds |= set(system.reachable_rounds(f"pc{i}", Location.FOLLOW_DECISION_3.value))
    return sorted(rounds) or list(DEFAULT_FOLLOW_ROUNDS)


def requirement_formulas(d: int) -> Dict[str, Formula]:
    """
    The atomic-commitment requirements as G-formulas: one decision for everybody,
    no decision is ever reversed, commit-validity and abort-validity.
    """
    stable = conj(
        And(
            Implies(Atom(f"outcome{i}", "commit"), Globally(Atom(f"outcome{i}", "commit"))),
            Implies(Atom(f"outcome{i}", "abort"), Globally(Atom(f"outcome{i}", "abort"))),
        )
        for i in participants(d)
    )
    return {
        "agreement": spec_formula(SpecId.S1A, d),
        "irreversibility": Globally(stable),
        "commit-validity": spec_formula(SpecId.S2A, d),
        "abort-validity": spec_formula(SpecId.S2B, d),
    }
