from __future__ import annotations

import logging
import weakref
from dataclasses import dataclass
from threading import Lock
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from kbp_commit.errors import UnknownAtom
from kbp_commit.generation.system import InterpretedSystem, Point
from kbp_commit.logic.formula import (
    And,
    Atom,
    Finally,
    Formula,
    Globally,
    Implies,
    Knows,
    Next,
    Not,
    Or,
    PowerNext,
    Top,
    atom_names,
    pretty,
)
from kbp_commit.protocol.environment import InitialChoice
from kbp_commit.protocol.types import GlobalState

logger = logging.getLogger(__name__)

# derived atoms: a boolean per point, e.g. the v_phi variable of a refinement obligation
ExtraAtom = Callable[[int, int], bool]
Table = List[List[bool]]        # table[r][m]


@dataclass(frozen=True)
class Trace:
    run: int
    states: Tuple[GlobalState, ...]     # rounds 0..quiescence
    choice: Optional[InitialChoice] = None


@dataclass(frozen=True)
class Verdict:
    holds: bool
    formula: str
    counterexample: Optional[Trace] = None
    violation: Optional[Point] = None   # innermost point where the formula's failure was located
    witness: Optional[Point] = None     # a point the knowing agent cannot tell apart from `violation`
    reason: Optional[str] = None


class Evaluator:
    """
    Bottom-up, table-based evaluation: each subformula gets a truth table over all points.
    Tables are memoised per formula; the memo is shared by threads under a lock.
    """

    def __init__(self, system: InterpretedSystem, extra_atoms: Optional[Mapping[str, ExtraAtom]] = None):
        self.system = system
        self.extra = dict(extra_atoms or {})
        self._memo: Dict[Formula, Table] = {}
        self._lock = Lock()
        self.names = set(system.valuation(0, 0)) if len(system) else set()

    def table(self, f: Formula) -> Table:
        t = self._memo.get(f)
        if t is None:
            t = self._compute(f)
            with self._lock:
                self._memo[f] = t
        return t

    def holds(self, point: Point, f: Formula) -> bool:
        return self.table(f)[point.run][point.round]

    def _compute(self, f: Formula) -> Table:
        sys = self.system
        R, H = len(sys.runs), sys.horizon

        if isinstance(f, Top):
            return [[True] * (H + 1) for _ in range(R)]

        if isinstance(f, Atom):
            if f.name in self.extra:
                fn = self.extra[f.name]
                want = f.expected == "true"
                return [[fn(r, m) == want for m in range(H + 1)] for r in range(R)]
            if f.name not in self.names:
                raise UnknownAtom(f"unknown atom {f.name!r}")
            return [[sys.valuation(r, m)[f.name] == f.expected for m in range(H + 1)] for r in range(R)]

        if isinstance(f, Not):
            s = self.table(f.sub)
            return [[not x for x in row] for row in s]

        if isinstance(f, (And, Or, Implies)):
            a, b = self.table(f.left), self.table(f.right)
            if isinstance(f, And):
                op = lambda x, y: x and y
            elif isinstance(f, Or):
                op = lambda x, y: x or y
            else:
                op = lambda x, y: (not x) or y
            return [[op(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]

        if isinstance(f, Next):
            s = self.table(f.sub)
            return [[row[min(m + 1, H)] for m in range(H + 1)] for row in s]

        if isinstance(f, PowerNext):
            s = self.table(f.sub)
            return [[row[min(m + f.n, H)] for m in range(H + 1)] for row in s]

        if isinstance(f, (Globally, Finally)):
            s = self.table(f.sub)
            out = []
            for row in s:
                acc = [False] * (H + 1)
                acc[H] = row[H]
                for m in range(H - 1, -1, -1):
                    acc[m] = (row[m] and acc[m + 1]) if isinstance(f, Globally) else (row[m] or acc[m + 1])
                out.append(acc)
            return out

        if isinstance(f, Knows):
            if f.agent not in sys.agents:
                raise UnknownAtom(f"unknown agent {f.agent!r} in K[{f.agent}]")
            s = self.table(f.sub)
            classes = sys.history_classes(f.agent)
            out = [[False] * (H + 1) for _ in range(R)]
            # synchronous perfect recall: only same-round points can share a history
            for m in range(H + 1):
                row = classes[m]
                ok: Dict[int, bool] = {}
                for r in range(R):
                    ok[row[r]] = ok.get(row[r], True) and s[r][m]
                for r in range(R):
                    out[r][m] = ok[row[r]]
            return out

        raise TypeError(f"not a formula: {f!r}")

    def locate(self, f: Formula, point: Point) -> Tuple[Point, Optional[Point]]:
        """
        Follow a false formula down to where it fails. Returns the failing point and,
        when the failure is a knowledge operator, the first indistinguishable point
        at which the known formula is false.
        """
        r, m = point.run, point.round
        H = self.system.horizon
        if isinstance(f, Knows):
            sub = self.table(f.sub)
            row = self.system.history_classes(f.agent)[m]
            for r2 in range(len(self.system.runs)):
                if row[r2] == row[r] and not sub[r2][m]:
                    return point, Point(r2, m)
            return point, None
        if isinstance(f, Next):
            return self.locate(f.sub, Point(r, min(m + 1, H)))
        if isinstance(f, PowerNext):
            return self.locate(f.sub, Point(r, min(m + f.n, H)))
        if isinstance(f, Globally):
            sub = self.table(f.sub)
            first = next(k for k in range(m, H + 1) if not sub[r][k])
            return self.locate(f.sub, Point(r, first))
        if isinstance(f, Implies):
            return self.locate(f.right, point)
        if isinstance(f, And):
            side = f.left if not self.table(f.left)[r][m] else f.right
            return self.locate(side, point)
        if isinstance(f, Or):
            found = self.locate(f.left, point)
            if found[1] is None:
                other = self.locate(f.right, point)
                if other[1] is not None:
                    return other
            return found
        return point, None


_EVALUATORS: "weakref.WeakKeyDictionary[InterpretedSystem, Evaluator]" = weakref.WeakKeyDictionary()
_EVALUATORS_LOCK = Lock()


def evaluator(system: InterpretedSystem, extra_atoms: Optional[Mapping[str, ExtraAtom]] = None) -> Evaluator:
    """Shared evaluator for a system; a private one when derived atoms are supplied."""
    if extra_atoms:
        return Evaluator(system, extra_atoms)
    with _EVALUATORS_LOCK:
        ev = _EVALUATORS.get(system)
        if ev is None:
            ev = Evaluator(system)
            _EVALUATORS[system] = ev
    return ev


def holds(system: InterpretedSystem, point: Point, formula: Formula) -> bool:
    return evaluator(system).holds(point, formula)


def indistinguishable(system: InterpretedSystem, p1: Point, p2: Point, agent: str) -> bool:
    return system.indistinguishable(p1, p2, agent)


def trace_of(system: InterpretedSystem, r: int) -> Trace:
    run = system.runs[r]
    return Trace(run=r, states=run.states[: run.quiescent_from + 1], choice=run.choice)


def check(
    system: InterpretedSystem,
    formula: Formula,
    extra_atoms: Optional[Mapping[str, ExtraAtom]] = None,
    ev: Optional[Evaluator] = None,
) -> Verdict:
    """Does the formula hold at (r, 0) for every run? On failure, report the first violating run."""
    ev = ev or evaluator(system, extra_atoms)
    unknown = sorted(n for n in atom_names(formula) if n not in ev.names and n not in ev.extra)
    if unknown:
        raise UnknownAtom(f"unknown atoms: {', '.join(unknown)}")
    t = ev.table(formula)
    text = pretty(formula)
    bad = [r for r in range(len(system.runs)) if not t[r][0]]
    if not bad:
        logger.info("holds: %s (%d runs)", text, len(system.runs))
        return Verdict(holds=True, formula=text)

    r = bad[0]
    violation, witness = ev.locate(formula, Point(r, 0))
    logger.info("fails: %s (%d of %d runs violate, first run %d)", text, len(bad), len(system.runs), r)
    return Verdict(
        holds=False,
        formula=text,
        counterexample=trace_of(system, r),
        violation=violation,
        witness=witness,
    )
