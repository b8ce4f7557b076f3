from __future__ import annotations

from typing import Any, Dict, List, Mapping, Optional

from kbp_commit.analysis.bounds import BoundsResult
from kbp_commit.analysis.specs import SpecId
from kbp_commit.logic.checker import Verdict


def normalise_cell(cell: Optional[object]) -> str:
    """Flatten a cell to one line without otherwise changing it."""
    if cell is None:
        return ""
    return str(cell).replace("\n", " ").replace("\r", " ").strip()


def render_table(header: List[str], rows: List[List[object]]) -> str:
    """Aligned plain-text table: header, separator, body. Byte-stable for equal input."""
    head = [normalise_cell(h) for h in header]
    body = [[normalise_cell(c) for c in (r + [""] * (len(head) - len(r)))[: len(head)]] for r in rows]
    widths = [max([len(h)] + [len(r[k]) for r in body]) for k, h in enumerate(head)]

    def line(cells: List[str]) -> str:
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    out = [line(head), "  ".join("-" * w for w in widths)]
    out += [line(r) for r in body]
    return "\n".join(out)


def _word(v: Verdict) -> str:
    return "holds" if v.holds else "fails"


def render_table2(rows: Mapping[str, Mapping[SpecId, Verdict]]) -> str:
    """One line per context (e.g. 'byzantine d=3'), one column per specification."""
    header = ["context"] + [s.value for s in SpecId]
    body = [[ctx] + [_word(row[s]) for s in SpecId] for ctx, row in rows.items()]
    return render_table(header, body)


def render_table3(rows: Mapping[str, BoundsResult]) -> str:
    header = ["context", "shortest n", "shortest rounds", "shortest msgs", "longest n", "longest rounds", "longest msgs"]
    body = [
        [ctx, b.shortest_k, b.shortest_rounds, b.shortest_messages, b.longest_w, b.longest_rounds, b.longest_messages]
        for ctx, b in rows.items()
    ]
    return render_table(header, body)


def verdict_record(v: Verdict, trace_file: Optional[str] = None) -> Dict[str, Any]:
    rec: Dict[str, Any] = {"holds": v.holds, "formula": v.formula}
    if v.counterexample is not None:
        rec["counterexample_run"] = v.counterexample.run
        if v.counterexample.choice is not None:
            rec["counterexample_choice"] = v.counterexample.choice.describe()
    if v.violation is not None:
        rec["violation"] = {"run": v.violation.run, "round": v.violation.round}
    if v.witness is not None:
        rec["witness"] = {"run": v.witness.run, "round": v.witness.round}
    if v.reason:
        rec["reason"] = v.reason
    if trace_file:
        rec["trace"] = trace_file
    return rec


def bounds_record(b: BoundsResult) -> Dict[str, Any]:
    return {
        "shortest": {
            "n": b.shortest_k,
            "rounds": b.shortest_rounds,
            "messages": b.shortest_messages,
            "witness_run": b.shortest_witness.run,
            "steps": [list(p) for p in b.shortest_steps],
        },
        "longest": {
            "n": b.longest_w,
            "rounds": b.longest_rounds,
            "messages": b.longest_messages,
            "witness_run": b.longest_witness.run,
            "steps": [list(p) for p in b.longest_steps],
        },
        "counting": "messages sent from the voting round up to n - 1; rounds are those with at least one message",
    }
