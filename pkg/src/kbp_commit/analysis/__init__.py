from kbp_commit.analysis.specs import SpecId, requirement_formulas, spec_formula
from kbp_commit.analysis.suite import (
    EXPECTED_HONEST_ROW,
    EXPECTED_BYZANTINE_ROW,
    conservative_guard_report,
    row_matches,
    run_table2,
)
from kbp_commit.analysis.bounds import BoundsResult, bounds, count_messages, find_longest, find_shortest

__all__ = [
    "BoundsResult",
    "EXPECTED_HONEST_ROW",
    "EXPECTED_BYZANTINE_ROW",
    "SpecId",
    "bounds",
    "conservative_guard_report",
    "count_messages",
    "find_longest",
    "find_shortest",
    "requirement_formulas",
    "row_matches",
    "run_table2",
    "spec_formula",
]
