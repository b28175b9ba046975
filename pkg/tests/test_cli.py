import json
import math

import numpy as np
import pytest

import gravtwin.cli as cli
from gravtwin import v_scaled

EXAMPLE_CFG = (
    "mass_g = 1e-9\n"
    "radius_cm = 1e-3\n"
    "width_cm = 0.1\n"
)

TINY_EVOLVE = {
    "kappa": "25", "lambda0": "4", "grid": "128", "extent": "48",
    "rel_points": "512", "dt": "0.02", "time": "4", "snap_every": "100",
}


def write_cfg(path, mapping=None, text=None):
    if text is None:
        text = "".join(f"{k} = {v}\n" for k, v in mapping.items())
    path.write_text(text)
    return str(path)


def test_estimate_from_scenario_file(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "ball.cfg", text=EXAMPLE_CFG)
    out = tmp_path / "out"
    assert cli.main(["estimate", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "estimates.json").read_text())
    assert summary["localization_time_s"] == pytest.approx(1.58e-3, rel=1e-2)
    assert summary["gaussian_energy_erg"] < 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "ok"
    assert manifest["summary"]["branch_count"] == summary["branch_count"]
    assert "localization_time_s" in capsys.readouterr().out


def test_estimate_mc_check(tmp_path):
    cfg = write_cfg(tmp_path / "ball.cfg", text=EXAMPLE_CFG)
    out = tmp_path / "out"
    code = cli.main(["estimate", "--config", cfg, "--out", str(out),
                     "--mc-check", "--mc-samples", "100000", "--seed", "3"])
    assert code == 0
    summary = json.loads((out / "estimates.json").read_text())
    err = summary["mc_potential_stderr_erg"]
    assert abs(summary["mc_potential_mean_erg"] - summary["gaussian_energy_erg"]) < 5 * err


def test_potential_csv(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["potential", "--u-from", "0", "--u-to", "4", "--num", "9",
                     "--out", str(out)]) == 0
    lines = (out / "potential.csv").read_text().strip().splitlines()
    assert lines[0] == "u,v"
    assert len(lines) == 10
    for row in lines[1:]:
        u, v = map(float, row.split(","))
        assert v == pytest.approx(float(v_scaled(u)), rel=1e-12)
    assert "0.0,-0.6" in capsys.readouterr().out


def test_spectrum_csv(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["spectrum", "--kappa", "30", "--umax", "30", "--points", "4000",
                     "--max-states", "3", "--out", str(out)]) == 0
    rows = (out / "spectrum.csv").read_text().strip().splitlines()[1:]
    energies = [float(r.split(",")[1]) for r in rows]
    assert len(energies) == 3
    assert all(-0.6 < e < 0.0 for e in energies)
    assert energies == sorted(energies)


def test_threshold_subcommand(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["threshold", "--out", str(out)]) == 0
    summary = json.loads((out / "threshold.json").read_text())
    assert summary["kappa_star"] == pytest.approx(0.3706, abs=2e-3)
    assert 1e9 < summary["mass_proton_masses"] < 1e12


def test_evolve_tiny_run_grows_entropy(tmp_path):
    cfg = write_cfg(tmp_path / "run.cfg", mapping=TINY_EVOLVE)
    out = tmp_path / "out"
    assert cli.main(["evolve", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["entropy_final"] > summary["entropy_initial"] + 0.05
    series = (out / "entropy_vs_time.csv").read_text().strip().splitlines()
    assert series[0].startswith("time,entropy")
    assert len(series) == 2 + int(float(TINY_EVOLVE["time"]) / 0.02) // 100
    assert (out / "snapshots" / "relative_0000.csv").exists()
    assert (out / "snapshots" / "marginal_0000.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "ok"


def test_evolve_deterministic_summary(tmp_path):
    cfg = write_cfg(tmp_path / "run.cfg", mapping=TINY_EVOLVE)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["evolve", "--config", cfg, "--out", str(out1), "--seed", "5"]) == 0
    assert cli.main(["evolve", "--config", cfg, "--out", str(out2), "--seed", "5"]) == 0
    assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()
    assert (out1 / "entropy_vs_time.csv").read_bytes() == (out2 / "entropy_vs_time.csv").read_bytes()


def test_evolve_both_mode_reports_fidelity(tmp_path):
    mapping = dict(TINY_EVOLVE, time="2")
    cfg = write_cfg(tmp_path / "run.cfg", mapping=mapping)
    out = tmp_path / "out"
    assert cli.main(["evolve", "--config", cfg, "--out", str(out), "--mode", "both"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["fidelity_final"] > 0.999
    header = (out / "entropy_vs_time.csv").read_text().splitlines()[0]
    assert "fidelity_factored_vs_2d" in header


def test_evolve_full2d_mode(tmp_path):
    mapping = dict(TINY_EVOLVE, time="2")
    cfg = write_cfg(tmp_path / "run.cfg", mapping=mapping)
    out = tmp_path / "out"
    assert cli.main(["evolve", "--config", cfg, "--out", str(out), "--mode", "full2d"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["evolve_mode"] == "full2d"
    assert summary["entropy_final"] > summary["entropy_initial"]
    assert "com_width_ratio_final" not in summary


def test_evolve_rejects_bad_mode(tmp_path):
    cfg = write_cfg(tmp_path / "run.cfg", mapping=dict(TINY_EVOLVE, evolve_mode="sideways"))
    assert cli.main(["evolve", "--config", cfg, "--out", str(tmp_path / "out")]) == 2


def test_snapshot_reduction_dumps_exist(tmp_path):
    cfg = write_cfg(tmp_path / "run.cfg", mapping=dict(TINY_EVOLVE, time="2"))
    out = tmp_path / "out"
    assert cli.main(["evolve", "--config", cfg, "--out", str(out)]) == 0
    coh = (out / "snapshots" / "coherence_0000.csv").read_text().splitlines()
    assert coh[0] == "s,C"
    s0, c0 = map(float, coh[1].split(","))
    assert s0 == 0.0 and c0 > 0.0
    eig = (out / "snapshots" / "eigenvalues_0000.csv").read_text().splitlines()
    assert eig[0] == "k,p_k"
    probs = [float(r.split(",")[1]) for r in eig[1:]]
    assert probs[0] == pytest.approx(1.0, abs=1e-8)  # initial product state is pure
    assert sum(probs) == pytest.approx(1.0, abs=1e-8)


def test_flags_override_file(tmp_path):
    mapping = dict(TINY_EVOLVE)
    cfg = write_cfg(tmp_path / "run.cfg", mapping=mapping)
    out = tmp_path / "out"
    assert cli.main(["evolve", "--config", cfg, "--out", str(out), "--kappa", "30"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["kappa"] == 30.0


def test_unknown_config_key_exits_2_with_manifest(tmp_path):
    cfg = write_cfg(tmp_path / "run.cfg", text="kappa = 25\nanswer = 42\n")
    out = tmp_path / "out"
    assert cli.main(["evolve", "--config", cfg, "--out", str(out)]) == 2
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "failed"
    assert "answer" in manifest["error"]


def test_missing_kappa_for_spectrum_exits_2(tmp_path):
    assert cli.main(["spectrum", "--out", str(tmp_path / "out")]) == 2


def test_mode_conflict_exits_2(tmp_path):
    cfg = write_cfg(tmp_path / "run.cfg", text="mode = evolve\n")
    assert cli.main(["potential", "--config", cfg, "--out", str(tmp_path / "out")]) == 2


def test_missing_config_file_exits_2(tmp_path):
    assert cli.main(["estimate", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_numerical_failure_exits_3_with_manifest(tmp_path, monkeypatch):
    from gravtwin.errors import NumericalError

    def boom(cfg, out):
        raise NumericalError("synthetic divergence")

    monkeypatch.setitem(cli._DISPATCH, "potential", boom)
    out = tmp_path / "out"
    assert cli.main(["potential", "--out", str(out)]) == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "failed"
    assert "synthetic divergence" in manifest["error"]


def test_sweep_two_couplings(tmp_path):
    out = tmp_path / "out"
    code = cli.main([
        "sweep", "--kappa-list", "5,25", "--grid", "128", "--extent", "48",
        "--dt", "0.02", "--time", "2", "--snap-every", "100",
        "--lambda0", "4", "--out", str(out),
    ])
    assert code == 0
    rows = (out / "sweep_summary.csv").read_text().strip().splitlines()
    assert rows[0].startswith("kappa,")
    assert len(rows) == 3
    assert (out / "run_kappa_5" / "summary.json").exists()
    assert (out / "run_kappa_25" / "summary.json").exists()


def test_config_hash_ignores_out_dir(tmp_path):
    a = cli.resolve_config("evolve", {}, {"kappa": 25.0, "out": "x"})
    b = cli.resolve_config("evolve", {}, {"kappa": 25.0, "out": "y"})
    assert cli._config_hash(a) == cli._config_hash(b)
    c = cli.resolve_config("evolve", {}, {"kappa": 26.0})
    assert cli._config_hash(a) != cli._config_hash(c)
