"""
Line-delimited trace format, one line per (run, round):

    run=<id> round=<m> key=value key=value ...

Keys after run/round are sorted so files diff cleanly. `delivered` lists the messages
that arrived at this round as sender>receiver:message, joined by ';'.
Verdict traces start with '# verdict=<holds|fails> formula=<formula>'.
"""
from __future__ import annotations

from pathlib import Path
from typing import Dict, Iterable, List, Optional

from kbp_commit.protocol.atoms import atoms
from kbp_commit.protocol.types import GlobalState


def delivered(gs: GlobalState, m: int) -> str:
    arrived = [s for s in gs.env.send_log + gs.env.participant_log if s.round == m - 1]
    return ";".join(f"{s.sender}>{s.receiver}:{s.message}" for s in sorted(arrived)) or "-"


def state_fields(gs: GlobalState, m: int) -> Dict[str, str]:
    out = dict(atoms(gs))
    out["delivered"] = delivered(gs, m)
    return out


def format_line(run_id: int, m: int, gs: GlobalState) -> str:
    body = " ".join(f"{k}={v}" for k, v in sorted(state_fields(gs, m).items()))
    return f"run={run_id} round={m} {body}"


def run_lines(run_id: int, states: Iterable[GlobalState]) -> List[str]:
    return [format_line(run_id, m, gs) for m, gs in enumerate(states)]


def export_system(system, out_path: str | Path) -> int:
    """Write every run, rounds 0..horizon; returns the number of lines written."""
    lines: List[str] = []
    for r, run in enumerate(system.runs):
        lines += run_lines(r, (run.state(m) for m in range(system.horizon + 1)))
    Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(lines)


def verdict_lines(verdict) -> List[str]:
    status = "holds" if verdict.holds else "fails"
    out = [f"# verdict={status} formula={verdict.formula}"]
    if verdict.violation is not None:
        out.append(f"# violation run={verdict.violation.run} round={verdict.violation.round}")
    if verdict.witness is not None:
        out.append(f"# witness run={verdict.witness.run} round={verdict.witness.round}")
    if verdict.counterexample is not None:
        out += run_lines(verdict.counterexample.run, verdict.counterexample.states)
    return out


def write_verdict_trace(verdict, out_path: str | Path, extra: Optional[List[str]] = None) -> None:
    lines = verdict_lines(verdict)
    if extra:
        # extra comment lines (e.g. the witness run) go right after the header
        lines = lines[:1] + [f"# {e}" for e in extra] + lines[1:]
    Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
