from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from kbp_commit.errors import CandidateFileError, ObservabilityViolation
from kbp_commit.generation.kbp_tests import knowledge_tests
from kbp_commit.generation.system import ObservationHistory
from kbp_commit.logic.formula import And, Atom, Formula, Implies, Not, Or, Top, conj, disj, is_present_time, pretty
from kbp_commit.logic.parser import parse
from kbp_commit.protocol import coordinator, participant
from kbp_commit.protocol.atoms import observable_names
from kbp_commit.protocol.types import COORDINATOR, Location, participants

_PAST = re.compile(r"^(?P<name>.+?)@-(?P<back>\d+)$")


def split_past(name: str) -> Tuple[str, int]:
    """'vote2@-1' -> ('vote2', 1): the value one round earlier."""
    m = _PAST.match(name)
    if m is None:
        return name, 0
    return m.group("name"), int(m.group("back"))


def check_local(expr: Formula, agent: str, d: int) -> None:
    """A predicate may use boolean connectives over the agent's own observed variables only."""
    visible = observable_names(agent, d)
    stack = [expr]
    while stack:
        f = stack.pop()
        if isinstance(f, Top):
            continue
        if isinstance(f, Atom):
            base, _ = split_past(f.name)
            if base not in visible:
                raise ObservabilityViolation(f"agent {agent} cannot observe {base!r}")
        elif isinstance(f, Not):
            stack.append(f.sub)
        elif isinstance(f, (And, Or, Implies)):
            stack += [f.left, f.right]
        else:
            raise CandidateFileError(f"temporal and knowledge operators are not allowed in predicates: {pretty(f)}")


def evaluate_local(expr: Formula, history: ObservationHistory) -> bool:
    if isinstance(expr, Top):
        return True
    if isinstance(expr, Atom):
        base, back = split_past(expr.name)
        value = history.value(base, back)
        return value is not None and value == expr.expected
    if isinstance(expr, Not):
        return not evaluate_local(expr.sub, history)
    if isinstance(expr, And):
        return evaluate_local(expr.left, history) and evaluate_local(expr.right, history)
    if isinstance(expr, Or):
        return evaluate_local(expr.left, history) or evaluate_local(expr.right, history)
    if isinstance(expr, Implies):
        return (not evaluate_local(expr.left, history)) or evaluate_local(expr.right, history)
    raise CandidateFileError(f"not a local predicate: {pretty(expr)}")


@dataclass(frozen=True)
class CandidatePredicate:
    """
    A concrete guess v_phi for one knowledge test: an expression over the agent's
    observation history, to be equivalent to `target` whenever the agent is at `location`.
    """
    name: str
    agent: str
    location: Location
    expr: Formula
    target: Formula
    test_id: Optional[str] = None               # which program test it replaces, if any
    check_rounds: Optional[Tuple[int, ...]] = None  # None: every round the location is reachable
    predicate: Callable[[ObservationHistory], bool] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.predicate is None:
            expr = self.expr
            object.__setattr__(self, "predicate", lambda h: evaluate_local(expr, h))


def make_candidate(
    name: str,
    agent: str,
    location: Location,
    expr: str,
    d: int,
    test_id: Optional[str] = None,
    target: Optional[str] = None,
    check_rounds: Optional[Tuple[int, ...]] = None,
) -> CandidatePredicate:
    """Build a candidate from expression text; the target defaults to the program's own test."""
    f = parse(expr)
    check_local(f, agent, d)
    if target is not None:
        goal = parse(target)
    elif test_id is not None and (agent, test_id) in knowledge_tests(d):
        goal = knowledge_tests(d)[(agent, test_id)].formula
    else:
        raise CandidateFileError(f"{name}: no target formula and no known test to take it from")
    if not is_present_time(goal):
        raise CandidateFileError(f"{name}: the target must not look ahead in time: {pretty(goal)}")
    return CandidatePredicate(name, agent, location, f, goal, test_id, check_rounds)


def cheating_evidence(i: str, d: int) -> Formula:
    """
    What participant i can see that proves the coordinator cheated: its own no vote
    against a commit, an announcement, or, in an opened run, a no vote alongside a
    commit or two different decisions.
    """
    peers = [j for j in participants(d) if j != i]
    own = parse(f"vote{i}=no & decision{i}=commit")
    some_no = disj([Atom(f"vote{i}", "no")] + [Atom(f"opened{i}.vote{j}", "no") for j in peers])
    some_commit = disj([Atom(f"decision{i}", "commit")] + [Atom(f"opened{i}.decision{j}", "commit") for j in peers])
    some_abort = disj([Atom(f"decision{i}", "abort")] + [Atom(f"opened{i}.decision{j}", "abort") for j in peers])
    opened = conj([Atom(f"opened{i}"), Or(And(some_no, some_commit), And(some_commit, some_abort))])
    return Or(Or(own, Atom("cheatingDetected")), opened)


def builtin_candidates(d: int) -> List[CandidatePredicate]:
    """The final predicates for every knowledge test of a d-agent system."""
    out: List[CandidatePredicate] = []
    for i in participants(d):
        out.append(make_candidate(
            f"c.stop_cond[{i}]", COORDINATOR, Location.COORD_TERM_CHECK,
            f"c.vote{i}=no | c.ack{i}", d, test_id=coordinator.stop_test(i),
        ))
        out.append(make_candidate(
            f"c.retrans_cond[{i}]", COORDINATOR, Location.COORD_RETRANS_LOOP,
            f"!(c.vote{i}=no | c.ack{i})", d, test_id=coordinator.retrans_test(i),
        ))
    for i in participants(d):
        evidence = pretty(cheating_evidence(i, d))
        out += [
            make_candidate(f"{i}.stop_cond", i, Location.TERM_CHECK,
                           f"vote{i}=no | !decision{i}=undecided", d, test_id=participant.STOP),
            make_candidate(f"{i}.retrans_cond", i, Location.RETRANS_LOOP, "false", d, test_id=participant.RETRANS),
            make_candidate(f"{i}.cheat@1", i, Location.CHEAT_CHECK_1,
                           f"vote{i}=no & decision{i}=commit", d, test_id=participant.CHEAT_1),
            make_candidate(f"{i}.cheat@2", i, Location.DECIDE_ABORT_2, evidence, d, test_id=participant.CHEAT_2),
            # negation of the (2) evidence, so no-voters that received abort and opened
            # runs that saw only aborts are covered as well
            make_candidate(f"{i}.nocheat@3", i, Location.FOLLOW_DECISION_3, f"!({evidence})", d,
                           test_id=participant.NO_CHEAT_3),
        ]
    return out
