from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from kbp_commit import __version__
from kbp_commit.analysis.bounds import bounds, eq_all_terminated, eq_never_terminated
from kbp_commit.analysis.report import (
    bounds_record,
    render_table2,
    render_table3,
    verdict_record,
)
from kbp_commit.analysis.suite import EXPECTED_BYZANTINE_ROW, check_requirements, row_matches, run_table2
from kbp_commit.errors import KbpError
from kbp_commit.generation.config import Config, load_config, save_config
from kbp_commit.generation.generator import PredicateTests, generate, runs_identical
from kbp_commit.generation.trace import export_system, write_verdict_trace
from kbp_commit.logic.checker import check
from kbp_commit.logic.formula import pretty
from kbp_commit.logic.parser import parse
from kbp_commit.records import provenance, save_json
from kbp_commit.refinement.candidate_file import format_candidates, load_candidates, verify_all
from kbp_commit.refinement.candidates import builtin_candidates

EXIT_OK, EXIT_FAILED, EXIT_ERROR = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="key=value config file (flags override it)")
    common.add_argument("--d", type=int, default=None, help="number of agents including the coordinator (2..5)")
    common.add_argument("--horizon", type=int, default=None, help="rounds by which every run must be quiescent")
    common.add_argument("--byzantine", choices=["never", "nondet"], default=None, help="may the coordinator be Byzantine")
    common.add_argument("--trap", choices=["never", "nondet"], default=None, help="may the environment open the run")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for independent checks (default: 1)")
    common.add_argument("--log-level", default="WARNING", help="logging level (default: WARNING)")

    p = argparse.ArgumentParser(
        prog="kbp-commit",
        description="Generate, model check and refine the knowledge-based two-phase commit programs.",
    )
    p.add_argument("--version", action="version", version=f"kbp-commit {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    sub.add_parser("generate", parents=[common], help="generate the system and export its runs")

    pc = sub.add_parser("check", parents=[common], help="model check one formula")
    src = pc.add_mutually_exclusive_group(required=True)
    src.add_argument("--formula", help="formula text")
    src.add_argument("--formula-file", help="file holding one formula")

    ps = sub.add_parser("suite", parents=[common], help="check specifications 1a..4b")
    ps.add_argument("--expect-paper", action="store_true",
                    help="exit 1 unless the row is the expected Byzantine row (F H F F F H H)")

    pr = sub.add_parser("refine", parents=[common], help="verify candidate predicates against their knowledge tests")
    pr.add_argument("--candidates", default=None, help="candidate file (default: the built-in predicates)")
    pr.add_argument("--regenerate", action="store_true",
                    help="also regenerate with the predicates in place of the knowledge tests and compare runs")

    sub.add_parser("bounds", parents=[common], help="shortest and longest termination bounds")
    return p


def effective_config(args: argparse.Namespace) -> Config:
    base = load_config(args.config) if args.config else Config()
    return base.with_overrides(
        d=args.d,
        horizon=args.horizon,
        byzantine_policy=args.byzantine,
        trap_policy=args.trap,
    ).validate()


def _header(cfg: Config, verb: str, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    block = {"command": verb}
    if extra:
        block.update(extra)
    return provenance(cfg, block)


def _generate(cfg: Config, step: str):
    print(f"{step} Generating system (d={cfg.d}, horizon={cfg.horizon}, "
          f"byzantine={cfg.byzantine_policy.value}, trap={cfg.trap_policy.value})")
    system = generate(cfg)
    print(f"Generated {len(system.runs)} runs")
    return system


def cmd_generate(args, cfg: Config, out: Path) -> int:
    system = _generate(cfg, "[1/2]")
    print("[2/2] Exporting runs")
    n_lines = export_system(system, out / "system.trace")
    quiescence: Dict[str, int] = {}
    for run in system.runs:
        quiescence[str(run.quiescent_from)] = quiescence.get(str(run.quiescent_from), 0) + 1
    save_json({
        "provenance": _header(cfg, "generate"),
        "runs": len(system.runs),
        "trace_lines": n_lines,
        "quiescent_from": quiescence,
        "knowledge_inputs": len(system.knowledge_log),
    }, out / "generate.json")
    print(f"Saved trace: {out / 'system.trace'}")
    return EXIT_OK


def cmd_check(args, cfg: Config, out: Path) -> int:
    text = args.formula if args.formula is not None else Path(args.formula_file).read_text(encoding="utf-8").strip()
    formula = parse(text)
    system = _generate(cfg, "[1/2]")
    print(f"[2/2] Checking {pretty(formula)}")
    verdict = check(system, formula)
    write_verdict_trace(verdict, out / "check.trace")
    save_json({"provenance": _header(cfg, "check"), "verdict": verdict_record(verdict, "check.trace")}, out / "check.json")
    print("holds" if verdict.holds else f"fails (counterexample run {verdict.counterexample.run})")
    return EXIT_OK if verdict.holds else EXIT_FAILED


def cmd_suite(args, cfg: Config, out: Path) -> int:
    system = _generate(cfg, "[1/3]")
    print("[2/3] Checking specifications")
    row = run_table2(system, jobs=args.jobs)
    records = {}
    for spec, verdict in row.items():
        trace = None
        if not verdict.holds:
            trace = f"spec-{spec.value}.trace"
            write_verdict_trace(verdict, out / trace)
        records[spec.value] = verdict_record(verdict, trace)
    context = f"byzantine={cfg.byzantine_policy.value} trap={cfg.trap_policy.value} d={cfg.d}"
    table = render_table2({context: row})
    (out / "table2.txt").write_text(table + "\n", encoding="utf-8")
    print("[3/3] Checking requirements")
    requirements = {name: verdict_record(v) for name, v in check_requirements(system).items()}
    matches = row_matches(row, EXPECTED_BYZANTINE_ROW)
    save_json({
        "provenance": _header(cfg, "suite"),
        "verdicts": records,
        "matches_byzantine_row": matches,
        "requirements": requirements,
    }, out / "table2.json")
    print(table)
    for name, rec in requirements.items():
        print(f"{name}: {'holds' if rec['holds'] else 'fails'}")
    if args.expect_paper and not matches:
        print("row differs from the expected Byzantine row")
        return EXIT_FAILED
    return EXIT_OK


def cmd_refine(args, cfg: Config, out: Path) -> int:
    system = _generate(cfg, "[1/3]")
    if args.candidates:
        cands = load_candidates(args.candidates, cfg.d)
        source = args.candidates
    else:
        cands = builtin_candidates(cfg.d)
        source = "builtin"
        (out / "candidates.txt").write_text(format_candidates(cands), encoding="utf-8")
    print(f"[2/3] Verifying {len(cands)} candidates from {source}")
    report = verify_all(system, cands, out / "refine-traces", jobs=args.jobs)
    (out / "refine.report").write_text("\n".join(report.lines()) + "\n", encoding="utf-8")

    regenerated: Optional[bool] = None
    if args.regenerate:
        print("[3/3] Regenerating with the predicates in place of the knowledge tests")
        regenerated = runs_identical(system, generate(cfg, tests=PredicateTests(cands)))
        print("run sets identical" if regenerated else "run sets differ")
    else:
        print("[3/3] Regeneration skipped")

    save_json({
        "provenance": _header(cfg, "refine", {"candidates": source}),
        "obligations": report.records,
        "all_passed": report.all_passed,
        "regenerated_identical": regenerated,
    }, out / "refine.json")
    failed = [r for r in report.records if r.verdict != "holds"]
    print(f"{len(report.records) - len(failed)} of {len(report.records)} obligations hold")
    ok = report.all_passed and regenerated is not False
    return EXIT_OK if ok else EXIT_FAILED


def cmd_bounds(args, cfg: Config, out: Path) -> int:
    system = _generate(cfg, "[1/2]")
    print("[2/2] Searching termination bounds")
    result = bounds(system)
    write_verdict_trace(check(system, eq_never_terminated(cfg.d, result.shortest_k)), out / "shortest.trace")
    write_verdict_trace(check(system, eq_all_terminated(cfg.d, result.longest_w - 1)), out / "longest.trace")
    context = f"byzantine={cfg.byzantine_policy.value} d={cfg.d}"
    table = render_table3({context: result})
    (out / "table3.txt").write_text(table + "\n", encoding="utf-8")
    save_json({"provenance": _header(cfg, "bounds"), "bounds": bounds_record(result)}, out / "bounds.json")
    print(table)
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "check": cmd_check,
    "suite": cmd_suite,
    "refine": cmd_refine,
    "bounds": cmd_bounds,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 0 for --help/--version and 2 for usage errors
        return int(e.code or 0)

    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = effective_config(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        save_config(cfg, out / "effective.cfg")
        return COMMANDS[args.verb](args, cfg, out)
    except KbpError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
