import json
import math

import pytest

from conftest import ISWAP_DOC, SQRT_ISWAP_DOC, toml_text
from snailbudget.allocation import AllocationProblem, maximize_delta, verify_allocation
from snailbudget.cli import main

SMALL_SWEEP = ["--eta-points", "3", "--delta-points", "4"]


@pytest.fixture
def config_file(tmp_path):
    def write(doc=ISWAP_DOC, **overrides):
        path = tmp_path / "device.toml"
        path.write_text(toml_text(dict(doc, **overrides)))
        return str(path)

    return write


def test_sweep_writes_csv_and_svg(config_file, tmp_path):
    out = tmp_path / "grid.csv"
    svg = tmp_path / "grid.svg"
    code = main(["sweep", config_file(), "--out-csv", str(out), "--out-svg", str(svg), *SMALL_SWEEP])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "eta,delta2_hz,fidelity,t_f_s"
    assert len(lines) == 1 + 12
    assert svg.read_text().startswith("<svg")


def test_sweep_malformed_config(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("lambda = \n")
    out = tmp_path / "grid.csv"
    assert main(["sweep", str(cfg), "--out-csv", str(out)]) == 2
    assert "malformed" in capsys.readouterr().err
    assert not out.exists()


def test_sweep_missing_config(tmp_path):
    out = tmp_path / "grid.csv"
    assert main(["sweep", str(tmp_path / "nope.toml"), "--out-csv", str(out)]) == 2
    assert not out.exists()


def test_sweep_deterministic(config_file, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cfg = config_file()
    assert main(["sweep", cfg, "--out-csv", str(a), *SMALL_SWEEP]) == 0
    assert main(["sweep", cfg, "--out-csv", str(b), *SMALL_SWEEP]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_unwritable_output(config_file, tmp_path):
    out = tmp_path / "missing" / "grid.csv"
    assert main(["sweep", config_file(), "--out-csv", str(out), *SMALL_SWEEP]) == 3


def test_allocate_reference_iswap(tmp_path):
    out = tmp_path / "alloc.json"
    code = main(["allocate", "--n", "4", "--band", "4e9:5e9", "--min-qubit-sep", "180e6", "--out", str(out)])
    assert code == 0
    rec = json.loads(out.read_text())
    assert rec["feasible"]
    assert rec["achieved_delta_hz"] >= 150e6
    assert len(rec["freqs_hz"]) == 4 and len(rec["conversions_hz"]) == 6
    assert set(rec["solver"]) >= {"branches", "lp_iterations"}


def test_allocate_six_qubits_matches_library(tmp_path):
    out = tmp_path / "alloc.json"
    assert main(["allocate", "--n", "6", "--band", "4e9:6e9", "--min-qubit-sep", "100e6", "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    ref = maximize_delta(AllocationProblem(6, 4e9, 6e9, 100e6))
    assert rec["achieved_delta_hz"] == ref.achieved_delta
    assert rec["freqs_hz"] == ref.freqs


def test_allocate_pigeonhole_infeasible(tmp_path):
    out = tmp_path / "alloc.json"
    code = main(["allocate", "--n", "8", "--band", "4e9:4.5e9", "--min-qubit-sep", "100e6", "--out", str(out)])
    assert code == 1
    assert json.loads(out.read_text())["feasible"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["allocate", "--n", "4", "--band", "5e9:4e9", "--min-qubit-sep", "1e8"],
        ["allocate", "--n", "4", "--band", "4GHz:5GHz", "--min-qubit-sep", "1e8"],
        ["allocate", "--n", "4", "--band", "4e9:5e9", "--min-qubit-sep", "-1"],
        ["allocate", "--n", "1", "--band", "4e9:5e9", "--min-qubit-sep", "1e8"],
        ["allocate", "--band", "4e9:5e9", "--min-qubit-sep", "1e8"],
        ["frobnicate"],
    ],
)
def test_allocate_bad_flags(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 2


def test_allocate_with_snail(tmp_path):
    out = tmp_path / "alloc.json"
    argv = ["allocate", "--n", "4", "--band", "4e9:6e9", "--min-qubit-sep", "100e6"]
    argv += ["--snail-freq", "5e9", "--snail-sep", "200e6", "--snail-conv-sep", "50e6", "--out", str(out)]
    assert main(argv) == 0
    rec = json.loads(out.read_text())
    assert all(abs(f - 5e9) >= 200e6 - 1 for f in rec["freqs_hz"])
    assert main(["verify", str(out)]) == 0


def test_budget_reference_iswap_override(config_file, tmp_path):
    out = tmp_path / "budget.json"
    code = main(["budget", config_file(delta2_q_hz=150e6), "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["summary"]["required_delta2_hz"] == 150e6
    freqs = rep["allocation"]["freqs_hz"]
    p = AllocationProblem(4, 4e9, 5e9, 180e6)
    assert verify_allocation(freqs, p, 150e6).ok
    assert rep["verification"]["ok"]
    assert rep["summary"]["eta"] > 0 and rep["summary"]["t_f_s"] > 0
    assert rep["summary"]["min_delta2_for_target_hz"] > 0


def test_budget_sqrt_iswap(config_file, tmp_path):
    out = tmp_path / "budget.json"
    assert main(["budget", config_file(SQRT_ISWAP_DOC, delta2_q_hz=120e6), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["allocation"]["feasible"]
    assert rep["allocation"]["achieved_delta_hz"] >= 120e6


def test_budget_unreachable_target(config_file, tmp_path):
    out = tmp_path / "budget.json"
    assert main(["budget", config_file(target_fidelity=1.0), "--out", str(out)]) == 4
    assert not out.exists()


def test_budget_without_override_uses_fidelity_separation(config_file, tmp_path):
    out = tmp_path / "budget.json"
    code = main(["budget", config_file(), "--out", str(out)])
    rep = json.loads(out.read_text())
    s = rep["summary"]
    assert s["required_delta2_hz"] == s["min_delta2_for_target_hz"]
    # four qubits in 1 GHz at 180 MHz spacing top out near 153 MHz
    assert code == (0 if s["achieved_delta_hz"] >= s["required_delta2_hz"] - 1 else 1)


def test_budget_expectation_rows(config_file, tmp_path):
    out = tmp_path / "budget.json"
    expect = tmp_path / "expect.json"
    expect.write_text(json.dumps({"achieved_delta_hz": 150e6, "required_delta2_hz": 150e6, "t1_limit": 1}))
    assert main(["budget", config_file(delta2_q_hz=150e6), "--out", str(out), "--expect", str(expect)]) == 0
    rows = {r["quantity"]: r for r in json.loads(out.read_text())["comparison"]}
    assert rows["achieved_delta_hz"]["ok"]
    assert rows["required_delta2_hz"]["ok"]
    assert not rows["t1_limit"]["ok"]


def test_budget_bad_config(config_file, tmp_path):
    out = tmp_path / "budget.json"
    assert main(["budget", config_file(**{"lambda": 2.0}), "--out", str(out)]) == 2
    assert not out.exists()


def test_verify_command(tmp_path, capsys):
    rec = {
        "n": 4,
        "band_hz": [4e9, 5e9],
        "min_qubit_sep_hz": 180e6,
        "freqs_hz": [4.00e9, 4.33e9, 4.81e9, 4.99e9],
        "achieved_delta_hz": 150e6,
        "feasible": True,
    }
    path = tmp_path / "rec.json"
    path.write_text(json.dumps(rec))
    assert main(["verify", str(path)]) == 0
    capsys.readouterr()
    assert main(["verify", str(path), "--delta", "160e6"]) == 1
    report = json.loads(capsys.readouterr().out)
    assert not report["ok"] and report["violations"][0]["kind"] == "conversion_gap"
    assert main(["verify", str(tmp_path / "missing.json")]) == 2


def test_two_qubit_record_round_trip(tmp_path):
    out = tmp_path / "alloc.json"
    assert main(["allocate", "--n", "2", "--band", "4e9:6e9", "--min-qubit-sep", "1e8", "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["achieved_delta_unbounded"] and rec["freqs_hz"] == [4e9, 6e9]
    assert main(["verify", str(out)]) == 0
