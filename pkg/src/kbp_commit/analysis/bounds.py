from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from kbp_commit.analysis.specs import termination
from kbp_commit.errors import BoundUnreachable
from kbp_commit.generation.system import InterpretedSystem
from kbp_commit.logic.checker import Trace, Verdict, check
from kbp_commit.logic.formula import Formula, Not, PowerNext
from kbp_commit.protocol.types import SendRecord

logger = logging.getLogger(__name__)


def all_sends(trace: Trace) -> List[SendRecord]:
    last = trace.states[-1].env
    return sorted(last.send_log + last.participant_log)


def count_messages(trace: Trace, rounds: range) -> int:
    """Messages sent during the given rounds (a message sent in round m is seen at m + 1)."""
    return sum(1 for s in all_sends(trace) if s.round in rounds)


def vote_round(trace: Trace) -> int:
    """The round in which participants send their votes."""
    rounds = [s.round for s in all_sends(trace) if s.message.startswith("vote:")]
    if not rounds:
        raise BoundUnreachable(f"run {trace.run} has no voting round")
    return min(rounds)


def communication_rounds(trace: Trace, rounds: range) -> int:
    """Rounds within the range in which at least one message was sent."""
    return len({s.round for s in all_sends(trace) if s.round in rounds})


@dataclass
class BoundsResult:
    shortest_k: int
    longest_w: int
    shortest_witness: Trace
    longest_witness: Trace
    shortest_messages: int
    longest_messages: int
    shortest_rounds: int            # communication rounds from the vote round on
    longest_rounds: int
    shortest_steps: List[Tuple[int, bool]] = field(default_factory=list)
    longest_steps: List[Tuple[int, bool]] = field(default_factory=list)


def _search(
    system: InterpretedSystem,
    make: Callable[[int], Formula],
    stop_when: bool,
    steps: List[Tuple[int, bool]],
) -> int:
    """
    Least n in 1..horizon at which check(make(n)).holds == stop_when, found by doubling
    then binary search; relies on the answer being monotone in n.
    """
    def attempt(n: int) -> bool:
        holds = check(system, make(n)).holds
        steps.append((n, holds))
        return holds == stop_when

    lo, n = 0, 1
    while not attempt(n):
        lo = n
        if n >= system.horizon:
            raise BoundUnreachable(f"no n <= {system.horizon} found")
        n = min(2 * n, system.horizon)
    hi = n
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if attempt(mid):
            hi = mid
        else:
            lo = mid
    return hi


def eq_never_terminated(d: int, n: int) -> Formula:
    """No run has terminated at round n."""
    return PowerNext(n, Not(termination(d)))


def eq_all_terminated(d: int, n: int) -> Formula:
    """Every run has terminated at round n."""
    return PowerNext(n, termination(d))


def find_shortest(system: InterpretedSystem, steps: Optional[List[Tuple[int, bool]]] = None) -> Tuple[int, Verdict]:
    """First n at which some run has terminated, with that run as the witness."""
    steps = steps if steps is not None else []
    k = _search(system, lambda n: eq_never_terminated(system.d, n), stop_when=False, steps=steps)
    verdict = check(system, eq_never_terminated(system.d, k))
    logger.info("shortest termination at n=%d (witness run %d)", k, verdict.counterexample.run)
    return k, verdict


def find_longest(system: InterpretedSystem, steps: Optional[List[Tuple[int, bool]]] = None) -> Tuple[int, Verdict]:
    """First n at which every run has terminated; the witness is a run still running at n - 1."""
    steps = steps if steps is not None else []
    w = _search(system, lambda n: eq_all_terminated(system.d, n), stop_when=True, steps=steps)
    verdict = check(system, eq_all_terminated(system.d, w - 1))
    if verdict.holds:
        raise BoundUnreachable(f"termination already holds everywhere at n={w - 1}")
    logger.info("longest termination at n=%d (witness run %d)", w, verdict.counterexample.run)
    return w, verdict


def bounds(system: InterpretedSystem) -> BoundsResult:
    short_steps: List[Tuple[int, bool]] = []
    long_steps: List[Tuple[int, bool]] = []
    k, sv = find_shortest(system, short_steps)
    w, lv = find_longest(system, long_steps)
    s_trace, l_trace = sv.counterexample, lv.counterexample
    s_range = range(vote_round(s_trace), k)
    l_range = range(vote_round(l_trace), w)
    return BoundsResult(
        shortest_k=k,
        longest_w=w,
        shortest_witness=s_trace,
        longest_witness=l_trace,
        shortest_messages=count_messages(s_trace, s_range),
        longest_messages=count_messages(l_trace, l_range),
        shortest_rounds=communication_rounds(s_trace, s_range),
        longest_rounds=communication_rounds(l_trace, l_range),
        shortest_steps=short_steps,
        longest_steps=long_steps,
    )
