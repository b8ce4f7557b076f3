from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, List, Optional, Protocol, Sequence, Tuple

from kbp_commit.errors import HorizonExceeded, MissingKnowledgeInput
from kbp_commit.generation.config import Config, Policy
from kbp_commit.generation.kbp_tests import knowledge_tests
from kbp_commit.generation.system import InterpretedSystem, Point, Run
from kbp_commit.logic.checker import evaluator
from kbp_commit.protocol.coordinator import required_coordinator_tests
from kbp_commit.protocol.environment import InitialChoice, advance, initial_state
from kbp_commit.protocol.participant import required_participant_tests
from kbp_commit.protocol.types import (
    COORDINATOR,
    ByzantineBehaviour,
    Decision,
    DecisionChoice,
    GlobalState,
    SendPattern,
    Vote,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class KnowledgeRecord:
    run: int
    round: int
    agent: str
    test_id: str
    value: bool


class InputResolver(Protocol):
    def resolve(self, prefix: InterpretedSystem, m: int, agent: str, test_id: str, runs: Sequence[int]) -> List[bool]:
        ...


class KnowledgeTests:
    """Resolve each test by model checking its knowledge formula on the prefix system."""

    def __init__(self, d: int):
        self._tests = knowledge_tests(d)

    def resolve(self, prefix, m, agent, test_id, runs):
        try:
            f = self._tests[(agent, test_id)].formula
        except KeyError:
            raise MissingKnowledgeInput(f"no knowledge formula for {agent}:{test_id}") from None
        t = evaluator(prefix).table(f)
        return [t[r][m] for r in runs]


class PredicateTests:
    """Resolve each test by a concrete predicate over the agent's observation history."""

    def __init__(self, candidates: Iterable):
        self._by_key = {(c.agent, c.test_id): c for c in candidates}

    def resolve(self, prefix, m, agent, test_id, runs):
        cand = self._by_key.get((agent, test_id))
        if cand is None:
            raise MissingKnowledgeInput(f"no candidate predicate for {agent}:{test_id}")
        return [bool(cand.predicate(prefix.history(Point(r, m), agent))) for r in runs]


def byzantine_behaviours(d: int) -> List[ByzantineBehaviour]:
    """Every misbehaviour, canonicalised to its per-participant vector and deduplicated."""
    n = d - 1
    seen = set()
    out: List[ByzantineBehaviour] = []
    for choice in (DecisionChoice.FORCE_ABORT, DecisionChoice.FORCE_COMMIT):
        candidates = [ByzantineBehaviour(choice, p) for p in SendPattern if p != SendPattern.ARBITRARY_VECTOR]
        candidates += [
            ByzantineBehaviour(choice, SendPattern.ARBITRARY_VECTOR, vec)
            for vec in product((Decision.ABORT, Decision.COMMIT), repeat=n)
        ]
        for b in candidates:
            c = b.canonical(d)
            if c not in seen:
                seen.add(c)
                out.append(c)
    return out


def enumerate_choices(config: Config) -> List[InitialChoice]:
    """All round-0 choices in canonical order; run ids follow this order."""
    n = config.d - 1
    byz: List[Tuple[bool, Optional[ByzantineBehaviour]]] = [(False, None)]
    if config.byzantine_policy == Policy.NONDETERMINISTIC:
        byz += [(True, b) for b in byzantine_behaviours(config.d)]
    traps = [False, True] if config.trap_policy == Policy.NONDETERMINISTIC else [False]
    if config.reliable_channels:
        plans: List[Tuple[bool, ...]] = [()]
    else:
        plans = [tuple(p) for p in product((True, False), repeat=n)]

    out = []
    for coord_vote in (Vote.YES, Vote.NO):
        for votes in product((Vote.YES, Vote.NO), repeat=n):
            for byzantine, behaviour in byz:
                for trap in traps:
                    for plan in plans:
                        out.append(InitialChoice(coord_vote, tuple(votes), byzantine, behaviour, trap, plan))
    return out


@dataclass
class _Branch:
    choice: InitialChoice
    states: List[GlobalState]
    quiescent_from: Optional[int] = None

    def required(self) -> List[Tuple[str, str]]:
        gs = self.states[-1]
        need = [(COORDINATOR, t) for t in required_coordinator_tests(gs.coordinator, gs.d)]
        for p in gs.participants:
            need += [(p.ident, t) for t in required_participant_tests(p)]
        return need


def _prefix(branches: List[_Branch], d: int, m: int, config: Config) -> InterpretedSystem:
    runs = [Run(tuple(b.states), b.quiescent_from if b.quiescent_from is not None else m, b.choice) for b in branches]
    return InterpretedSystem(runs, d, m, config)


def generate(config: Config, tests: Optional[InputResolver] = None) -> InterpretedSystem:
    """
    Build every run of the programs round by round. At round m each knowledge test is
    resolved over the system of all length-(m+1) prefixes, then all agents step in lockstep.
    """
    config = config.validate()
    d, horizon = config.d, config.horizon
    tests = tests or KnowledgeTests(d)
    branches = [_Branch(c, [initial_state(c)]) for c in enumerate_choices(config)]
    log: List[KnowledgeRecord] = []
    logger.info("generating d=%d horizon=%d: %d initial choices", d, horizon, len(branches))

    for m in range(horizon):
        live = [k for k, b in enumerate(branches) if b.quiescent_from is None]
        if not live:
            for b in branches:
                b.states.append(b.states[-1])
            continue

        needs: Dict[Tuple[str, str], List[int]] = {}
        for k in live:
            for key in branches[k].required():
                needs.setdefault(key, []).append(k)

        inputs: Dict[int, Dict[str, Dict[str, bool]]] = {k: {} for k in live}
        if needs:
            prefix = _prefix(branches, d, m, config)
            for (agent, test_id), runs in sorted(needs.items()):
                values = tests.resolve(prefix, m, agent, test_id, runs)
                logger.debug("round %d %s:%s true in %d of %d runs", m, agent, test_id, sum(values), len(runs))
                for k, v in zip(runs, values):
                    inputs[k].setdefault(agent, {})[test_id] = v
                    log.append(KnowledgeRecord(k, m, agent, test_id, v))

        for k, b in enumerate(branches):
            if b.quiescent_from is not None:
                b.states.append(b.states[-1])
                continue
            nxt, _ = advance(b.states[-1], b.choice, inputs[k], m)
            b.states.append(nxt)
            if nxt.quiescent():
                b.quiescent_from = m + 1

        logger.info(
            "round %d: %d live runs, %d knowledge evaluations",
            m, len(live), sum(len(r) for r in needs.values()),
        )

    stuck = [b for b in branches if b.quiescent_from is None]
    if stuck:
        hint = "" if config.reliable_channels else " (a participant that lost start never answers, so these runs never quiesce)"
        raise HorizonExceeded(
            f"{len(stuck)} of {len(branches)} runs not quiescent by round {horizon}; "
            f"first: {stuck[0].choice.describe()}{hint}"
        )

    runs, remap = _dedupe(branches)
    log = sorted(KnowledgeRecord(remap[r.run], r.round, r.agent, r.test_id, r.value) for r in log if r.run in remap)
    logger.info("generated %d runs (%d knowledge inputs recorded)", len(runs), len(log))
    return InterpretedSystem(runs, d, horizon, config, knowledge_log=log)


def _dedupe(branches: List[_Branch]) -> Tuple[List[Run], Dict[int, int]]:
    """Drop runs identical to an earlier one; remap[k] is the surviving id of branch k's run."""
    first: Dict[Tuple[GlobalState, ...], int] = {}
    runs: List[Run] = []
    remap: Dict[int, int] = {}
    for k, b in enumerate(branches):
        states = tuple(b.states)
        if states in first:
            continue
        first[states] = len(runs)
        remap[k] = len(runs)
        runs.append(Run(states, b.quiescent_from, b.choice))
    return runs, remap


def verify_knowledge_inputs(system: InterpretedSystem) -> List[Tuple[KnowledgeRecord, bool]]:
    """
    Re-check every recorded knowledge input against the complete system.
    Returns the mismatches as (record, value in the final system); empty means the
    generated system implements the knowledge-based programs.
    """
    tests = knowledge_tests(system.d)
    ev = evaluator(system)
    mismatches = []
    for rec in system.knowledge_log:
        actual = ev.holds(Point(rec.run, rec.round), tests[(rec.agent, rec.test_id)].formula)
        if actual != rec.value:
            mismatches.append((rec, actual))
    if mismatches:
        logger.warning("%d of %d knowledge inputs disagree with the final system", len(mismatches), len(system.knowledge_log))
    return mismatches


def runs_identical(a: InterpretedSystem, b: InterpretedSystem) -> bool:
    """Same runs, state for state, in the same order."""
    return len(a.runs) == len(b.runs) and all(x.states == y.states for x, y in zip(a.runs, b.runs))
