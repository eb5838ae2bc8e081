"""Command-line surface: canonical report lines, exit codes, relation files
and the packaged selftest."""

from __future__ import annotations

import json
import shutil

from simrel import selftest
from simrel.cli import main
from simrel.selftest import GOLDENS_DIR, run_selftest

OMEGA_XCL = "(S I I) (S I I)"
OMEGA_CBPV = (
    "(lam (x0:U (mu a0. U a0 -> F unit)). unfold force x0 @ x0)"
    " @ thunk fold[mu a0. U a0 -> F unit]"
    " (lam (x0:U (mu a0. U a0 -> F unit)). unfold force x0 @ x0)"
)


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip().splitlines()
    return code, [json.loads(line) for line in out]


def test_trace_emits_the_golden_run_and_is_byte_stable(capsys):
    argv = ("-L", "xcl", "trace", "(S K) I", "--label", "I")
    code = main(list(argv))
    first = capsys.readouterr().out.splitlines()
    assert code == 0
    payload = json.loads(first[0])
    got = [(r["arrow"], r["term"]) for r in payload["trace"]]
    assert got == [
        ("", "S K I"),
        ("-->", "S'(K) I"),
        ("-->", "S''(K, I)"),
        ("--label-->", "K I (I I)"),
        ("-->", "K'(I) (I I)"),
        ("-->", "I"),
    ]
    assert main(list(argv)) == 0
    second = capsys.readouterr().out.splitlines()
    assert first[0] == second[0]  # canonical line carries no timing noise
    assert json.loads(second[1])["stats"].keys() == json.loads(first[1])["stats"].keys()


def test_typecheck_reports_types_in_and_out_of_context(capsys):
    code, (payload, _) = _run(capsys, "-L", "cbpv", "typecheck", "thunk prod star")
    assert code == 0
    assert payload["type"] == "U (F unit)"
    code, (payload, _) = _run(
        capsys, "-L", "cbpv", "typecheck", "force #0", "--context", "U F unit"
    )
    assert code == 0
    assert payload["type"] == "F unit"


def test_normalize_finds_normal_forms_and_admits_running_out(capsys):
    code, (payload, _) = _run(capsys, "-L", "xcl", "normalize", "K I K")
    assert code == 0
    assert payload["status"] == "normalized"
    assert payload["normal_form"] == "I"
    code, (payload, _) = _run(
        capsys, "-L", "xcl", "normalize", OMEGA_XCL, "--fuel", "10"
    )
    assert code == 2
    assert payload["status"] == "fuel-exhausted"
    code, (payload, _) = _run(
        capsys, "-L", "cbpv", "normalize", OMEGA_CBPV, "--fuel", "50"
    )
    assert code == 1
    assert payload["status"] == "looping"  # a revisit is proof, not fuel loss
    assert payload["steps"] == 3


def test_check_sim_verdicts_map_to_exit_codes(capsys, tmp_path):
    good = tmp_path / "beta.rel"
    good.write_text("DELTA\ncomp :: I o K ~ [K]\n")
    code, (payload, _) = _run(capsys, "-L", "fgcbv", "check-sim", str(good))
    assert code == 0 and payload["verdict"] == "holds"
    bad = tmp_path / "bad.rel"
    bad.write_text("DELTA\ncomp :: [K] ~ [I]\n")
    code, (payload, _) = _run(capsys, "-L", "fgcbv", "check-sim", str(bad))
    assert code == 1 and payload["verdict"] == "fails"
    assert payload["witness"]


def test_logrel_reports_retention_per_pair(capsys, tmp_path):
    uni = tmp_path / "uni.terms"
    uni.write_text("value :: K\nvalue :: S''([K'([I])], [K])\n")
    rel = tmp_path / "eta.rel"
    rel.write_text(
        "DELTA %s\nvalue :: K ~ S''([K'([I])], [K])\n"
        "value :: S''([K'([I])], [K]) ~ K\n" % uni.name
    )
    code, (payload, _) = _run(
        capsys, "-L", "fgcbv", "logrel", str(rel), "--depth", "8"
    )
    assert code == 0 and payload["verdict"] == "holds"
    assert all(row["retained"] for row in payload["pairs"])
    assert payload["stabilized_at"] is not None


def test_ctx_oracle_agrees_on_a_beta_pair(capsys):
    code, (payload, _) = _run(
        capsys, "-L", "cbpv", "ctx-oracle",
        "force thunk prod star", "prod star",
        "--ctx-size", "4", "--fuel", "300",
    )
    assert code == 0 and payload["verdict"] == "holds"


def test_input_problems_exit_three(capsys, tmp_path):
    code, (payload,) = _run(capsys, "-L", "xcl", "typecheck", "S )")
    assert code == 3 and "error" in payload
    code, (payload,) = _run(capsys, "-L", "xcl", "trace", "S K", "--flag", "fix")
    assert code == 3 and "error" in payload
    code, (payload,) = _run(
        capsys, "-L", "cbpv", "ctx-oracle", "prod star", "lam (x0:unit). prod x0"
    )
    assert code == 3 and "error" in payload
    code, (payload,) = _run(capsys, "trace", "S K")  # no language given
    assert code == 3 and "error" in payload
    missing = tmp_path / "nope.rel"
    code, (payload,) = _run(capsys, "-L", "xcl", "check-sim", str(missing))
    assert code == 3 and "error" in payload


def test_seed_env_var_lands_in_the_config(capsys, monkeypatch):
    monkeypatch.setenv("WORKBENCH_SEED", "11")
    code, (payload, _) = _run(capsys, "-L", "xcl", "normalize", "I")
    assert code == 0
    assert payload["config"]["seed"] == 11


def test_selftest_runs_clean_from_the_package(capsys):
    code, (payload, stats) = _run(capsys, "selftest", "--fuel", "200")
    assert code == 0
    assert payload["failed"] == 0
    assert payload["passed"] == len(payload["results"])
    assert stats["stats"]["goldens"] > 30


def test_selftest_isolated_golden_corruption(tmp_path, monkeypatch):
    spoiled = tmp_path / "goldens"
    shutil.copytree(GOLDENS_DIR, spoiled)
    victim = spoiled / "trace-ski-label.golden"
    victim.write_text(victim.read_text().replace("expect: -->|I", "expect: -->|K"))
    monkeypatch.setattr(selftest, "GOLDENS_DIR", spoiled)
    results, _ = run_selftest(seed=0, fuel=200)
    bad = [r for r in results if not r["ok"]]
    assert len(bad) == 1
    assert bad[0]["name"] == "trace-ski-label"
