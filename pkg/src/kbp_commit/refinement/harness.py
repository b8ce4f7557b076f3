from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

from kbp_commit.errors import InfeasibleObligation
from kbp_commit.generation.kbp_tests import pc_atom
from kbp_commit.generation.system import InterpretedSystem, Point
from kbp_commit.logic.checker import Evaluator, Verdict, check, evaluator
from kbp_commit.logic.formula import Atom, Formula, Implies, Knows, Not, PowerNext, iff
from kbp_commit.refinement.candidates import CandidatePredicate

logger = logging.getLogger(__name__)

V_ATOM = "v_phi"


@dataclass(frozen=True)
class Obligation:
    """X^n (pc_agent = location => (v_phi <=> target)) for one candidate and one n."""
    candidate: CandidatePredicate
    n: int

    @property
    def ident(self) -> str:
        return f"{self.candidate.name}@{self.n}"

    @property
    def formula(self) -> Formula:
        c = self.candidate
        return PowerNext(self.n, Implies(Atom(pc_atom(c.agent), c.location.value), iff(Atom(V_ATOM), c.target)))


def reachable_rounds(system: InterpretedSystem, cand: CandidatePredicate) -> List[int]:
    return system.reachable_rounds(pc_atom(cand.agent), cand.location.value)


def check_rounds(system: InterpretedSystem, cand: CandidatePredicate) -> List[int]:
    reachable = reachable_rounds(system, cand)
    if cand.check_rounds is None:
        rounds = reachable
    else:
        rounds = [n for n in cand.check_rounds if n in reachable]
    if not rounds:
        raise InfeasibleObligation(
            f"{cand.name}: {cand.agent} never reaches {cand.location.value}"
            + ("" if cand.check_rounds is None else f" at rounds {list(cand.check_rounds)}")
        )
    return rounds


def _v_atom(system: InterpretedSystem, cand: CandidatePredicate):
    pc_name, loc = pc_atom(cand.agent), cand.location.value

    # off-location points make the obligation vacuous, so skip building their histories
    def v(r: int, m: int) -> bool:
        if system.valuation(r, m)[pc_name] != loc:
            return False
        return bool(cand.predicate(system.history(Point(r, m), cand.agent)))

    return v


def _explain(system: InterpretedSystem, cand: CandidatePredicate, verdict: Verdict, v) -> Verdict:
    """Classify a failure and make sure it carries an indistinguishable witness point."""
    p = verdict.violation
    if p is None:
        return verdict
    knows = evaluator(system).holds(p, cand.target)
    if v(p.run, p.round) and not knows:
        reason = "false positive: predicate true where the knowledge formula is false"
    else:
        reason = "false negative: predicate false where the knowledge formula is true"
    witness = verdict.witness
    inner = cand.target
    while isinstance(inner, Not):
        inner = inner.sub
    if witness is None and isinstance(inner, Knows) and not evaluator(system).holds(p, inner):
        _, witness = evaluator(system).locate(inner, p)
    if witness is None:
        # the agent's whole class at that round agrees on the predicate; name its first member
        row = system.history_classes(cand.agent)[p.round]
        first = next(r for r in range(len(system.runs)) if row[r] == row[p.run])
        witness = Point(first, p.round)
    return replace(verdict, witness=witness, reason=reason)


def verify_candidate(system: InterpretedSystem, cand: CandidatePredicate) -> List[Tuple[int, Verdict]]:
    """One verdict per round n at which the candidate's location is reachable."""
    rounds = check_rounds(system, cand)
    v = _v_atom(system, cand)
    ev = Evaluator(system, {V_ATOM: v})
    out: List[Tuple[int, Verdict]] = []
    for n in rounds:
        ob = Obligation(cand, n)
        verdict = check(system, ob.formula, ev=ev)
        if not verdict.holds:
            # the violation is located at round n by construction of X^n
            violation = Point(verdict.counterexample.run, n)
            verdict = _explain(system, cand, replace(verdict, violation=violation), v)
        out.append((n, verdict))
    failed = [n for n, vd in out if not vd.holds]
    logger.info("%s: %d obligations, %d failed %s", cand.name, len(out), len(failed), failed or "")
    return out


def candidate_passes(system: InterpretedSystem, cand: CandidatePredicate) -> bool:
    return all(vd.holds for _, vd in verify_candidate(system, cand))


def first_failure(results: List[Tuple[int, Verdict]]) -> Optional[Tuple[int, Verdict]]:
    return next(((n, vd) for n, vd in results if not vd.holds), None)
