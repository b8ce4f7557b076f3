from __future__ import annotations

from dataclasses import dataclass, field
from threading import Lock
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from kbp_commit.protocol.atoms import Observation, atoms, observable_names, observation
from kbp_commit.protocol.environment import InitialChoice
from kbp_commit.protocol.types import GlobalState, agents


@dataclass(frozen=True, order=True)
class Point:
    run: int
    round: int


@dataclass(frozen=True)
class Run:
    """A bounded run; states[m] == states[m + 1] for every m >= quiescent_from."""
    states: Tuple[GlobalState, ...]
    quiescent_from: int
    choice: Optional[InitialChoice] = field(default=None, compare=False)

    @property
    def horizon(self) -> int:
        return len(self.states) - 1

    def state(self, m: int) -> GlobalState:
        # the tail stutters, so any later round reads the last state
        return self.states[min(m, self.horizon)]


@dataclass(frozen=True)
class ObservationHistory:
    """An agent's perfect-recall local state: one observation per round 0..m."""
    agent: str
    observations: Tuple[Observation, ...]

    def __len__(self) -> int:
        return len(self.observations)

    @property
    def round(self) -> int:
        return len(self.observations) - 1

    def value(self, name: str, back: int = 0) -> Optional[str]:
        """Value of an observed variable `back` rounds ago; None before round 0 or if unobserved."""
        k = self.round - back
        if k < 0:
            return None
        return dict(self.observations[k]).get(name)


def observation_history(run: Run, agent: str, m: int) -> ObservationHistory:
    """Projection of a run onto what `agent` has observed up to round m."""
    d = run.states[0].d
    visible = observable_names(agent, d)
    return ObservationHistory(agent, tuple(observation(atoms(run.state(k)), visible) for k in range(m + 1)))


class InterpretedSystem:
    """
    A finite set of runs sharing one horizon, plus the interpretation of atoms.

    Valuations and per-agent history classes are computed lazily and memoised;
    the memo tables are filled under a lock so one system can serve several checker threads.
    """

    def __init__(self, runs: Sequence[Run], d: int, horizon: int, config=None, knowledge_log: Sequence = ()):
        self.runs: Tuple[Run, ...] = tuple(runs)
        self.d = d
        self.horizon = horizon
        self.config = config
        self.knowledge_log = tuple(knowledge_log)      # KnowledgeRecords fed to the programs
        self._valuations: Dict[int, List[Dict[str, str]]] = {}
        self._classes: Dict[str, List[List[int]]] = {}
        self._lock = Lock()

    def __len__(self) -> int:
        return len(self.runs)

    @property
    def agents(self) -> List[str]:
        return agents(self.d)

    def points(self) -> Iterator[Point]:
        for r in range(len(self.runs)):
            for m in range(self.horizon + 1):
                yield Point(r, m)

    def valuation(self, r: int, m: int) -> Dict[str, str]:
        vals = self._valuations.get(r)
        if vals is None:
            run = self.runs[r]
            vals = []
            for k in range(self.horizon + 1):
                if k > 0 and run.state(k) is run.state(k - 1):
                    vals.append(vals[-1])
                else:
                    vals.append(atoms(run.state(k)))
            with self._lock:
                self._valuations[r] = vals
        return vals[min(m, self.horizon)]

    def history_classes(self, agent: str) -> List[List[int]]:
        """classes[m][r]: id of agent's history at (r, m); equal ids iff equal histories."""
        table = self._classes.get(agent)
        if table is not None:
            return table
        visible = observable_names(agent, self.d)
        intern: Dict[Tuple[int, Observation], int] = {}
        table = []
        prev = [-1] * len(self.runs)
        for m in range(self.horizon + 1):
            row = []
            for r in range(len(self.runs)):
                key = (prev[r], observation(self.valuation(r, m), visible))
                row.append(intern.setdefault(key, len(intern)))
            table.append(row)
            prev = row
        with self._lock:
            self._classes[agent] = table
        return table

    def history(self, point: Point, agent: str) -> ObservationHistory:
        visible = observable_names(agent, self.d)
        obs = tuple(observation(self.valuation(point.run, k), visible) for k in range(point.round + 1))
        return ObservationHistory(agent, obs)

    def indistinguishable(self, p1: Point, p2: Point, agent: str) -> bool:
        if p1.round != p2.round:
            return False
        row = self.history_classes(agent)[p1.round]
        return row[p1.run] == row[p2.run]

    def reachable_rounds(self, name: str, value: str) -> List[int]:
        """Rounds m at which atom name=value holds in some run."""
        return [
            m for m in range(self.horizon + 1)
            if any(self.valuation(r, m).get(name) == value for r in range(len(self.runs)))
        ]


def prefix_system(system: InterpretedSystem, m: int) -> InterpretedSystem:
    """The system cut to prefixes of length m + 1, duplicates removed (first occurrence kept)."""
    m = min(m, system.horizon)
    seen = set()
    runs = []
    for run in system.runs:
        states = run.states[: m + 1]
        if states in seen:
            continue
        seen.add(states)
        runs.append(Run(states, min(run.quiescent_from, m), run.choice))
    return InterpretedSystem(runs, system.d, m, system.config)
