"""
Candidate files: one section per predicate.

    [c.stop_cond[2]]
    agent = c
    location = CoordTermCheck
    test = stop_cond[2]          # optional: the program test it replaces
    target = K[c] dhat[2]        # optional when `test` names a known test
    rounds = 3, 4, 5             # optional: default is every reachable round
    expr = c.vote2=no | c.ack2   # observed variables of `agent`; name@-k reads k rounds back

'#' starts a comment.
"""
from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from kbp_commit.errors import CandidateFileError, FormulaSyntaxError, InfeasibleObligation
from kbp_commit.generation.system import InterpretedSystem
from kbp_commit.generation.trace import write_verdict_trace
from kbp_commit.logic.checker import Verdict
from kbp_commit.logic.formula import pretty
from kbp_commit.protocol.types import Location
from kbp_commit.refinement.candidates import CandidatePredicate, make_candidate
from kbp_commit.refinement.harness import verify_candidate

logger = logging.getLogger(__name__)

_SECTION = re.compile(r"^\[(?P<name>.+)\]$")
_KEYS = {"agent", "location", "test", "target", "rounds", "expr"}


def parse_candidates(text: str, d: int) -> List[CandidatePredicate]:
    sections: List[Tuple[str, int, Dict[str, Tuple[str, int]]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            sections.append((m.group("name").strip(), lineno, {}))
            continue
        if not sections:
            raise CandidateFileError("entry outside of a [section]", lineno)
        if "=" not in line:
            raise CandidateFileError(f"expected key = value, got {raw.strip()!r}", lineno)
        key, value = line.split("=", 1)
        key = key.strip()
        if key not in _KEYS:
            raise CandidateFileError(f"unknown key {key!r}", lineno)
        sections[-1][2][key] = (value.strip(), lineno)

    return [_build(name, lineno, entries, d) for name, lineno, entries in sections]


def _build(name: str, lineno: int, entries: Dict[str, Tuple[str, int]], d: int) -> CandidatePredicate:
    for required in ("agent", "location", "expr"):
        if required not in entries:
            raise CandidateFileError(f"[{name}] is missing {required!r}", lineno)
    loc_text, loc_line = entries["location"]
    try:
        location = Location(loc_text)
    except ValueError:
        raise CandidateFileError(f"unknown location {loc_text!r}", loc_line) from None

    rounds: Optional[Tuple[int, ...]] = None
    if "rounds" in entries:
        text, rline = entries["rounds"]
        try:
            rounds = tuple(int(x) for x in text.replace(",", " ").split())
        except ValueError:
            raise CandidateFileError(f"rounds must be integers, got {text!r}", rline) from None

    expr_text, expr_line = entries["expr"]
    try:
        return make_candidate(
            name,
            entries["agent"][0],
            location,
            expr_text,
            d,
            test_id=entries.get("test", (None, 0))[0],
            target=entries.get("target", (None, 0))[0],
            check_rounds=rounds,
        )
    except FormulaSyntaxError as e:
        raise CandidateFileError(f"[{name}] {e}", expr_line) from e


def load_candidates(path: str | Path, d: int) -> List[CandidatePredicate]:
    return parse_candidates(Path(path).read_text(encoding="utf-8"), d)


def format_candidates(cands: List[CandidatePredicate]) -> str:
    blocks = []
    for c in cands:
        lines = [f"[{c.name}]", f"agent = {c.agent}", f"location = {c.location.value}"]
        if c.test_id:
            lines.append(f"test = {c.test_id}")
        lines.append(f"target = {pretty(c.target)}")
        if c.check_rounds is not None:
            lines.append("rounds = " + ", ".join(str(n) for n in c.check_rounds))
        lines.append(f"expr = {pretty(c.expr)}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


@dataclass(frozen=True)
class ObligationRecord:
    obligation: str
    candidate: str
    n: Optional[int]
    verdict: str                    # holds | fails | infeasible
    reason: Optional[str] = None
    violation: Optional[str] = None
    witness: Optional[str] = None
    trace: Optional[str] = None

    def line(self) -> str:
        parts = [f"obligation={self.obligation}", f"n={'-' if self.n is None else self.n}", f"verdict={self.verdict}"]
        for key in ("violation", "witness", "trace"):
            value = getattr(self, key)
            parts.append(f"{key}={value if value is not None else '-'}")
        return " ".join(parts)


@dataclass
class RefineReport:
    records: List[ObligationRecord] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return bool(self.records) and all(r.verdict == "holds" for r in self.records)

    def lines(self) -> List[str]:
        return [r.line() for r in self.records]


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.@-]+", "_", name).strip("_")


def _point(p) -> Optional[str]:
    return None if p is None else f"run{p.run}:round{p.round}"


def _records(
    cand: CandidatePredicate,
    results: List[Tuple[int, Verdict]],
    out_dir: Optional[Path],
) -> List[ObligationRecord]:
    out = []
    for n, vd in results:
        trace = None
        if not vd.holds and out_dir is not None:
            trace = f"{_safe(cand.name)}.n{n}.trace"
            extra = [f"reason {vd.reason}"] if vd.reason else None
            write_verdict_trace(vd, out_dir / trace, extra)
        out.append(ObligationRecord(
            obligation=f"{cand.name}@{n}",
            candidate=cand.name,
            n=n,
            verdict="holds" if vd.holds else "fails",
            reason=vd.reason,
            violation=_point(vd.violation),
            witness=_point(vd.witness),
            trace=trace,
        ))
    return out


def verify_all(
    system: InterpretedSystem,
    cands: List[CandidatePredicate],
    out_dir: Optional[str | Path] = None,
    jobs: int = 1,
) -> RefineReport:
    """Check every obligation of every candidate; obligations are independent, so they may run in parallel."""
    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)

    def one(cand: CandidatePredicate) -> List[ObligationRecord]:
        try:
            return _records(cand, verify_candidate(system, cand), out_path)
        except InfeasibleObligation as e:
            logger.warning("%s", e)
            return [ObligationRecord(obligation=cand.name, candidate=cand.name, n=None, verdict="infeasible", reason=str(e))]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(one, cands))
    else:
        batches = [one(c) for c in cands]
    report = RefineReport([r for batch in batches for r in batch])
    logger.info("%d obligations, all passed: %s", len(report.records), report.all_passed)
    return report


def refine_loop(
    system: InterpretedSystem,
    candidate_file: str | Path,
    out_dir: Optional[str | Path] = None,
    jobs: int = 1,
) -> RefineReport:
    """One iteration of the guess-check-edit loop over a candidate file."""
    cands = load_candidates(candidate_file, system.d)
    return verify_all(system, cands, out_dir, jobs)
