import json

import numpy as np
import pytest

from powercos.cli import main
from tests.conftest import E0_GOLDEN, GAMMA_NEEL_GOLDEN, GAP_GOLDEN, TAU_GOLDEN


def run_cli(args):
    return main([str(a) for a in args])


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    return header, rows


def test_spectrum_defaults(tmp_path):
    assert run_cli(["spectrum", "--out", tmp_path]) == 0
    payload = json.loads((tmp_path / "spectrum.json").read_text())
    assert payload["ground_energy"] == pytest.approx(-5.4243, abs=5e-4)
    assert payload["tau"] == pytest.approx(1.1583, abs=1e-4)
    assert payload["gap"] == pytest.approx(GAP_GOLDEN, abs=1e-9)
    assert payload["ground_overlap"] == pytest.approx(GAMMA_NEEL_GOLDEN, abs=1e-9)
    assert payload["gap"] > 0 and payload["ground_overlap"] > 0
    assert len(payload["eigenvalues"]) == 16
    sidecar = json.loads((tmp_path / "spectrum.config.json").read_text())
    assert sidecar["n"] == 4 and sidecar["mode"] == "operator-exact"
    assert sidecar["degrees"] == list(range(61))  # defaults materialised


def test_spectrum_single_qubit_override(tmp_path):
    ham = tmp_path / "h.txt"
    ham.write_text("1.0 Z\n")
    assert run_cli(["spectrum", "--out", tmp_path, "--hamiltonian-file", ham]) == 0
    payload = json.loads((tmp_path / "spectrum.json").read_text())
    assert payload["eigenvalues"] == [-1.0, 1.0]


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"jx": 1.0, "typo_key": 3}))
    assert run_cli(["spectrum", "--config", cfg, "--out", tmp_path]) == 2


def test_unknown_nested_key_rejected(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trotter": {"order": 2, "bogus": 1}}))
    assert run_cli(["spectrum", "--config", cfg, "--out", tmp_path]) == 2


def test_missing_seed_rejected(tmp_path):
    assert run_cli(["convergence", "--out", tmp_path, "--degrees", "0..3"]) == 2
    assert run_cli(["noisy", "--out", tmp_path, "--degrees", "0..3"]) == 2
    # shots = 0 removes the sampling, so no seed is needed
    assert run_cli(["convergence", "--out", tmp_path, "--degrees", "0..3",
                    "--shots", 0]) == 0


def test_resonance_failure_exit_code(tmp_path):
    ham = tmp_path / "h.txt"
    ham.write_text("1.0 Z\n1.0 I\n")  # spectrum {0, 2}: ground energy 0
    assert run_cli(["spectrum", "--out", tmp_path, "--hamiltonian-file", ham]) == 3


def test_bad_mode_rejected(tmp_path):
    assert run_cli(["spectrum", "--out", tmp_path, "--mode", "nope"]) == 2
    assert run_cli(["convergence", "--out", tmp_path, "--shots", 0,
                    "--mode", "mcmr-sampled"]) == 2


def test_convergence_columns_and_values(tmp_path):
    assert run_cli(["convergence", "--out", tmp_path, "--degrees", "0..10",
                    "--shots", 2000, "--seed", 7]) == 0
    header, rows = read_csv(tmp_path / "convergence.csv")
    assert header == ["degree", "energy", "fidelity", "sampled_energy",
                      "sampled_stderr", "cumulative_success_prob"]
    assert len(rows) == 11
    assert float(rows[0]["energy"]) == pytest.approx(-1.5, abs=1e-12)
    assert float(rows[0]["cumulative_success_prob"]) == 1.0
    fids = [float(r["fidelity"]) for r in rows]
    assert all(b >= a - 1e-12 for a, b in zip(fids, fids[1:]))
    for r in rows:
        assert abs(float(r["sampled_energy"]) - float(r["energy"])) \
            < 5 * max(float(r["sampled_stderr"]), 1e-6)


def test_convergence_without_shots_drops_columns(tmp_path):
    assert run_cli(["convergence", "--out", tmp_path, "--degrees", "0..3",
                    "--shots", 0]) == 0
    header, rows = read_csv(tmp_path / "convergence.csv")
    assert header == ["degree", "energy", "fidelity", "cumulative_success_prob"]
    assert len(rows) == 4


def test_advantage_dataset(tmp_path):
    assert run_cli(["advantage", "--out", tmp_path, "--degrees", "0..12"]) == 0
    header, rows = read_csv(tmp_path / "advantage.csv")
    assert header == ["protocol", "cost", "infidelity"]
    filt = {int(r["cost"]): float(r["infidelity"]) for r in rows if r["protocol"] == "filter"}
    tasp = {int(r["cost"]): float(r["infidelity"]) for r in rows if r["protocol"] == "tasp"}
    assert set(filt) == set(tasp) == set(range(13))
    # cost-0 rows are the start-state infidelities of each protocol
    assert filt[0] == pytest.approx(1 - GAMMA_NEEL_GOLDEN, abs=1e-9)
    assert tasp[0] == pytest.approx(1 - 0.0015830800080777869, abs=1e-9)
    # beyond the crossover every filter point beats the same-cost baseline
    crossover = min(c for c in range(13) if all(filt[x] < tasp[x] for x in range(c, 13)))
    assert crossover <= 12


def test_noisy_dataset(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trajectories": 30}))
    assert run_cli(["noisy", "--config", cfg, "--out", tmp_path, "--degrees", "0..4",
                    "--shots", 600, "--seed", 3]) == 0
    header, rows = read_csv(tmp_path / "noisy.csv")
    assert header == ["step", "mean_energy", "stderr", "abort_rate",
                      "n_trajectories", "ideal_energy"]
    assert len(rows) == 5
    aborts = [float(r["abort_rate"]) for r in rows]
    assert aborts[0] == 0.0
    assert all(b >= a for a, b in zip(aborts, aborts[1:]))
    assert float(rows[0]["ideal_energy"]) == pytest.approx(-1.5, abs=1e-12)


def test_detune_dataset(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"detune_degrees": "1..20", "deltas": {"max": 0.02, "points": 5}}))
    assert run_cli(["detune", "--config", cfg, "--out", tmp_path]) == 0
    header, rows = read_csv(tmp_path / "detune.csv")
    assert header == ["delta", "degree", "survival_exact", "survival_approx", "rel_error"]
    assert len(rows) == 5 * 20
    zero_rows = [r for r in rows if float(r["delta"]) == 0.0]
    assert all(float(r["survival_exact"]) == pytest.approx(1.0, abs=1e-12) for r in zero_rows)
    assert all(float(r["rel_error"]) < 0.02 for r in rows)

    header, tol_rows = read_csv(tmp_path / "detune_tolerance.csv")
    assert header == ["degree", "delta_star"]
    tol = {int(r["degree"]): float(r["delta_star"]) for r in tol_rows}
    assert tol[4] == pytest.approx(tol[1] / 2, rel=1e-9)
    assert tol[20] == pytest.approx(tol[5] / 2, rel=1e-9)


def snapshot(out_dir):
    return {p.name: p.read_bytes() for p in sorted(out_dir.iterdir()) if p.is_file()}


@pytest.mark.parametrize("args", [
    ["spectrum"],
    ["convergence", "--degrees", "0..6", "--shots", 500, "--seed", 13],
    ["advantage", "--degrees", "0..6"],
    ["noisy", "--degrees", "0..3", "--shots", 200, "--seed", 13],
    ["detune"],
])
def test_byte_identical_reruns(tmp_path, args):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trajectories": 10, "detune_degrees": "1..10",
                               "out": str(tmp_path / "run")}))
    full = args + ["--config", cfg]
    assert run_cli(full) == 0
    first = snapshot(tmp_path / "run")
    assert run_cli(full) == 0
    second = snapshot(tmp_path / "run")
    assert first.keys() == second.keys() and all(first[k] == second[k] for k in first)


def test_initial_state_options(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"initial_state": "uniform"}))
    assert run_cli(["spectrum", "--config", cfg, "--out", tmp_path]) == 0
    gamma_uniform = json.loads((tmp_path / "spectrum.json").read_text())["ground_overlap"]

    cfg.write_text(json.dumps({"initial_state": 5}))
    assert run_cli(["spectrum", "--config", cfg, "--out", tmp_path]) == 0
    gamma_neel = json.loads((tmp_path / "spectrum.json").read_text())["ground_overlap"]
    assert gamma_neel == pytest.approx(GAMMA_NEEL_GOLDEN, abs=1e-9)
    assert gamma_uniform != pytest.approx(gamma_neel, abs=1e-6)

    cfg.write_text(json.dumps({"initial_state": 99}))
    assert run_cli(["spectrum", "--config", cfg, "--out", tmp_path]) == 2


def test_tau_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tau": 0.5}))
    assert run_cli(["spectrum", "--config", cfg, "--out", tmp_path]) == 0
    assert json.loads((tmp_path / "spectrum.json").read_text())["tau"] == 0.5
    cfg.write_text(json.dumps({"tau": -1.0}))
    assert run_cli(["spectrum", "--config", cfg, "--out", tmp_path]) == 2


def test_e0_value_in_sidecar_free_output(tmp_path):
    assert run_cli(["spectrum", "--out", tmp_path]) == 0
    payload = json.loads((tmp_path / "spectrum.json").read_text())
    assert payload["ground_energy"] == pytest.approx(E0_GOLDEN, abs=1e-12)
    assert payload["tau"] == pytest.approx(TAU_GOLDEN, abs=1e-12)
