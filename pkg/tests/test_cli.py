import json

import pytest

from conftest import make_config
from kbp_commit.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, build_parser, effective_config, main
from kbp_commit.generation.config import Policy, load_config

HONEST_D2 = ["--d", "2", "--byzantine", "never", "--trap", "never"]


def run(tmp_path, *argv):
    return main(list(argv) + ["--out", str(tmp_path)])


def test_flags_override_the_config_file(tmp_path):
    cfg_path = tmp_path / "kbp.cfg"
    cfg_path.write_text("d = 4\nhorizon = 12\ntrap_policy = never\n", encoding="utf-8")
    args = build_parser().parse_args(["generate", "--config", str(cfg_path), "--d", "2", "--byzantine", "never"])
    cfg = effective_config(args)
    assert (cfg.d, cfg.horizon) == (2, 12)
    assert cfg.trap_policy == Policy.NEVER and cfg.byzantine_policy == Policy.NEVER


def test_generate(tmp_path):
    assert run(tmp_path, "generate", *HONEST_D2) == EXIT_OK
    summary = json.loads((tmp_path / "generate.json").read_text(encoding="utf-8"))
    assert summary["runs"] == 4
    assert summary["quiescent_from"] == {"9": 4}
    assert summary["provenance"]["config"]["d"] == 2
    assert (tmp_path / "system.trace").exists()
    assert load_config(tmp_path / "effective.cfg") == make_config(2)


def test_check_exit_codes(tmp_path):
    assert run(tmp_path, "check", *HONEST_D2, "--formula", "G !cheating") == EXIT_OK
    assert run(tmp_path, "check", *HONEST_D2, "--formula", "G decision=commit") == EXIT_FAILED
    rec = json.loads((tmp_path / "check.json").read_text(encoding="utf-8"))["verdict"]
    assert rec["holds"] is False
    assert rec["trace"] == "check.trace"


def test_check_formula_file(tmp_path):
    (tmp_path / "phi.txt").write_text("F K[c] dhat[2]\n", encoding="utf-8")
    assert run(tmp_path, "check", *HONEST_D2, "--formula-file", str(tmp_path / "phi.txt")) == EXIT_OK


def test_suite_matches_the_byzantine_row(tmp_path, capsys):
    assert run(tmp_path, "suite", "--d", "2", "--expect-paper") == EXIT_OK
    out = capsys.readouterr().out
    assert "[1/3] Generating system" in out
    assert "agreement: fails" in out and "irreversibility: holds" in out
    table = (tmp_path / "table2.txt").read_text(encoding="utf-8")
    assert table.splitlines()[0].split() == ["context", "1a", "1b", "2a", "2b", "3", "4a", "4b"]
    assert (tmp_path / "spec-3.trace").exists()
    assert not (tmp_path / "spec-4a.trace").exists()
    payload = json.loads((tmp_path / "table2.json").read_text(encoding="utf-8"))
    assert payload["matches_byzantine_row"]
    assert {k: v["holds"] for k, v in payload["requirements"].items()} == {
        "agreement": False, "irreversibility": True, "commit-validity": False, "abort-validity": False,
    }


def test_honest_suite_is_not_the_byzantine_row(tmp_path):
    assert run(tmp_path, "suite", *HONEST_D2) == EXIT_OK
    assert run(tmp_path, "suite", *HONEST_D2, "--expect-paper") == EXIT_FAILED


def test_refine_builtins(tmp_path):
    assert run(tmp_path, "refine", "--d", "2", "--regenerate") == EXIT_OK
    assert (tmp_path / "candidates.txt").exists()
    payload = json.loads((tmp_path / "refine.json").read_text(encoding="utf-8"))
    assert payload["all_passed"] and payload["regenerated_identical"]
    assert all(line.split()[2] == "verdict=holds"
               for line in (tmp_path / "refine.report").read_text(encoding="utf-8").splitlines())


def test_refine_reports_a_bad_guess(tmp_path):
    path = tmp_path / "guess.txt"
    path.write_text("[c.stop_cond[2]]\nagent = c\nlocation = CoordTermCheck\ntest = stop_cond[2]\nexpr = c.ack2\n",
                    encoding="utf-8")
    assert run(tmp_path, "refine", *HONEST_D2, "--candidates", str(path)) == EXIT_FAILED
    assert list((tmp_path / "refine-traces").glob("*.trace"))


def test_bounds(tmp_path):
    assert run(tmp_path, "bounds", *HONEST_D2) == EXIT_OK
    rec = json.loads((tmp_path / "bounds.json").read_text(encoding="utf-8"))["bounds"]
    assert (rec["shortest"]["n"], rec["longest"]["n"]) == (2, 7)
    assert (rec["shortest"]["messages"], rec["longest"]["messages"]) == (1, 3)
    assert (tmp_path / "shortest.trace").exists() and (tmp_path / "longest.trace").exists()


@pytest.mark.parametrize("argv", [
    ["check", "--d", "9", "--formula", "true"],
    ["check", "--d", "2", "--formula", "K["],
    ["check", "--d", "2", "--formula", "nosuch"],
    ["refine", "--d", "2", "--candidates", "/nonexistent/candidates.txt"],
    ["generate", "--d", "2", "--horizon", "6"],
])
def test_errors_exit_two(tmp_path, capsys, argv):
    assert run(tmp_path, *argv) == EXIT_ERROR
    assert capsys.readouterr().err.startswith("error: ")


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["check", "--d", "2"]) == 2
    assert main(["--version"]) == 0
    assert "kbp-commit" in capsys.readouterr().out


def test_trivial_knowledge(tmp_path, capsys):
    assert run(tmp_path, "check", *HONEST_D2, "--formula", "K[2] true") == EXIT_OK
    assert capsys.readouterr().out.strip().endswith("holds")
