from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional

from kbp_commit.analysis.specs import SpecId, follow_rounds, requirement_formulas, spec_formula
from kbp_commit.generation.system import InterpretedSystem, Point
from kbp_commit.logic.checker import Verdict, check, evaluator
from kbp_commit.logic.parser import parse
from kbp_commit.protocol.types import Location, participants

logger = logging.getLogger(__name__)

# verdict row for the Byzantine context: True = holds
EXPECTED_BYZANTINE_ROW: Dict[SpecId, bool] = {
    SpecId.S1A: False,
    SpecId.S1B: True,
    SpecId.S2A: False,
    SpecId.S2B: False,
    SpecId.S3: False,
    SpecId.S4A: True,
    SpecId.S4B: True,
}

# with an honest coordinator every specification holds
EXPECTED_HONEST_ROW: Dict[SpecId, bool] = {s: True for s in SpecId}


def run_table2(system: InterpretedSystem, jobs: int = 1) -> Dict[SpecId, Verdict]:
    """Check every specification on the system, in SpecId order."""
    rounds = follow_rounds(system)
    formulas = {s: spec_formula(s, system.d, rounds) for s in SpecId}
    # warm the shared history tables before fanning out
    for a in system.agents:
        system.history_classes(a)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            verdicts = list(pool.map(lambda s: check(system, formulas[s]), list(SpecId)))
    else:
        verdicts = [check(system, formulas[s]) for s in SpecId]
    row = dict(zip(SpecId, verdicts))
    logger.info("table row: %s", " ".join(f"{s.value}={'holds' if v.holds else 'fails'}" for s, v in row.items()))
    return row


def row_matches(row: Mapping[SpecId, Verdict], expected: Mapping[SpecId, bool]) -> bool:
    return all(row[s].holds == expected[s] for s in expected)


def check_requirements(system: InterpretedSystem) -> Dict[str, Verdict]:
    return {name: check(system, f) for name, f in requirement_formulas(system.d).items()}


@dataclass
class ConservativeGuardReport:
    """
    Where a participant at location (3) voted yes and received commit, does it ever
    know the coordinator did not cheat? If not, a K_i(!cheating) guard never lets it commit.
    """
    points_checked: int = 0
    guard_true: int = 0
    by_agent: Dict[str, int] = field(default_factory=dict)
    first_guard_true: Optional[Point] = None

    @property
    def never_commits(self) -> bool:
        return self.points_checked > 0 and self.guard_true == 0


def conservative_guard_report(system: InterpretedSystem) -> ConservativeGuardReport:
    ev = evaluator(system)
    report = ConservativeGuardReport()
    for i in participants(system.d):
        guard = ev.table(parse(f"K[{i}] !cheating"))
        seen = 0
        for r in range(len(system.runs)):
            for m in range(system.horizon + 1):
                val = system.valuation(r, m)
                if val[f"pc{i}"] != Location.FOLLOW_DECISION_3.value:
                    continue
                if val[f"vote{i}"] != "yes" or val[f"decision{i}"] != "commit":
                    continue
                seen += 1
                if guard[r][m]:
                    report.guard_true += 1
                    if report.first_guard_true is None:
                        report.first_guard_true = Point(r, m)
        report.by_agent[i] = seen
        report.points_checked += seen
    logger.info(
        "conservative guard: %d points at location (3) with a yes vote and a commit, guard true at %d",
        report.points_checked, report.guard_true,
    )
    return report
