"""Experiment command line: seeded, config-driven, CSV/JSON outputs.

Subcommands: spectrum, convergence, advantage, noisy, detune.  Settings come
from built-in defaults, an optional JSON config file, then CLI flags, in
that order; the fully resolved config is written next to every output file
as `<stem>.config.json` for provenance.  Identical config and seed give
byte-identical outputs.

Exit codes: 0 success, 2 config error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from powercos.adiabatic import TaspConfig, run_tasp, transverse_field_start
from powercos.errors import (ConfigError, NumericalError, PowercosError,
                             ResourceLimitError)
from powercos.evolve import TrotterConfig
from powercos.filtering import (FilterConfig, detuning_tolerance, predicted_amplitude,
                                resonance_tau, run_filter)
from powercos.pauli import build_heisenberg_xyz, load_hamiltonian
from powercos.sampling import (NoiseModel, noisy_filter_trajectory, plan_measurements,
                               sample_energy)
from powercos.spectral import diagonalize, ground_overlap, spectral_gap
from powercos.state import init_basis, neel_index, uniform_state

DEFAULTS = {
    "n": 4,
    "jx": 1.0,
    "jy": 1.0,
    "jz": 0.5,
    "h": 0.0,
    "hamiltonian_file": None,
    "initial_state": "neel",        # "neel" | "uniform" | basis index
    "tau": "auto",                  # "auto" | positive number
    "degrees": "0..60",             # "a..b" | list of ints
    "mode": "operator-exact",
    "trotter": {"order": 2, "substeps": 8},
    "shots": 10000,
    "seed": None,
    "noise": {"depolarizing_2q": 5e-3, "depolarizing_1q": 2e-4, "readout_flip": 1e-2},
    "trajectories": 500,
    "survival_floor": 0.9,
    "deltas": {"max": 0.02, "points": 11},
    "detune_degrees": "1..100",
    "degeneracy_tol": 1e-8,
    "out": "out",
}

_NESTED_KEYS = {
    "trotter": {"order", "substeps"},
    "noise": {"depolarizing_2q", "depolarizing_1q", "readout_flip"},
    "deltas": {"max", "points"},
}


def _parse_degrees(value, *, minimum: int = 0) -> list[int]:
    if isinstance(value, str):
        parts = value.split("..")
        if len(parts) != 2:
            raise ConfigError(f"degree range must look like 'a..b', got {value!r}")
        try:
            lo, hi = int(parts[0]), int(parts[1])
        except ValueError:
            raise ConfigError(f"degree range bounds must be integers, got {value!r}")
        if hi < lo:
            raise ConfigError(f"empty degree range {value!r}")
        degrees = list(range(lo, hi + 1))
    elif isinstance(value, list):
        try:
            degrees = sorted({int(d) for d in value})
        except (TypeError, ValueError):
            raise ConfigError(f"degrees list must contain integers, got {value!r}")
    else:
        raise ConfigError(f"degrees must be 'a..b' or a list, got {value!r}")
    if not degrees or degrees[0] < minimum:
        raise ConfigError(f"degrees must all be >= {minimum}")
    return degrees


def _merge_config(path: str | None) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if path is None:
        return cfg
    try:
        with open(path, "r", encoding="utf-8") as fh:
            user = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(user, dict):
        raise ConfigError("config file must contain a JSON object")
    unknown = set(user) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key, value in user.items():
        if key in _NESTED_KEYS:
            if not isinstance(value, dict):
                raise ConfigError(f"config field {key!r} must be an object")
            bad = set(value) - _NESTED_KEYS[key]
            if bad:
                raise ConfigError(f"unknown keys under {key!r}: {sorted(bad)}")
            cfg[key].update(value)
        else:
            cfg[key] = value
    return cfg


def _validate(cfg: dict, command: str) -> dict:
    """Type-check fields, materialise defaults, normalise per command."""
    out = copy.deepcopy(cfg)
    try:
        out["n"] = int(cfg["n"])
        out["jx"], out["jy"], out["jz"], out["h"] = (
            float(cfg["jx"]), float(cfg["jy"]), float(cfg["jz"]), float(cfg["h"]))
        out["shots"] = int(cfg["shots"])
        out["trajectories"] = int(cfg["trajectories"])
        out["survival_floor"] = float(cfg["survival_floor"])
        out["degeneracy_tol"] = float(cfg["degeneracy_tol"])
        out["trotter"] = {"order": int(cfg["trotter"]["order"]),
                          "substeps": int(cfg["trotter"]["substeps"])}
        out["noise"] = {k: float(v) for k, v in cfg["noise"].items()}
        out["deltas"] = {"max": float(cfg["deltas"]["max"]),
                         "points": int(cfg["deltas"]["points"])}
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"bad config value: {exc}")

    if out["hamiltonian_file"] is None and out["n"] < 2:
        raise ConfigError("n must be >= 2")
    if out["shots"] < 0:
        raise ConfigError("shots must be >= 0")
    if out["trajectories"] < 1:
        raise ConfigError("trajectories must be >= 1")
    if not 0.0 < out["survival_floor"] <= 1.0:
        raise ConfigError("survival_floor must be in (0, 1]")
    if not 0.0 <= out["deltas"]["max"] < 0.5:
        raise ConfigError("deltas.max must be in [0, 0.5)")
    if out["deltas"]["points"] < 1:
        raise ConfigError("deltas.points must be >= 1")

    tau = cfg["tau"]
    if tau != "auto":
        try:
            tau = float(tau)
        except (TypeError, ValueError):
            raise ConfigError(f"tau must be 'auto' or a number, got {tau!r}")
        if not tau > 0.0:
            raise ConfigError("tau override must be positive")
    out["tau"] = tau

    init = cfg["initial_state"]
    if init not in ("neel", "uniform"):
        try:
            init = int(init)
        except (TypeError, ValueError):
            raise ConfigError(
                f"initial_state must be 'neel', 'uniform' or a basis index, got {init!r}")
        if init < 0:
            raise ConfigError("basis index must be >= 0")
    out["initial_state"] = init

    out["degrees"] = _parse_degrees(cfg["degrees"])
    out["detune_degrees"] = _parse_degrees(cfg["detune_degrees"], minimum=1)

    mode = cfg["mode"]
    if mode not in ("operator-exact", "circuit-exact-u", "circuit-trotter", "mcmr-sampled"):
        raise ConfigError(f"unknown mode {mode!r}")
    if command in ("convergence", "advantage") and mode == "mcmr-sampled":
        raise ConfigError(f"{command} needs a deterministic mode, not 'mcmr-sampled'")
    if command == "noisy":
        mode = "circuit-trotter"  # gate noise attaches to the Trotterized circuit
    out["mode"] = mode

    if cfg["seed"] is not None:
        out["seed"] = int(cfg["seed"])
    needs_seed = command == "noisy" or (command == "convergence" and out["shots"] > 0)
    if needs_seed and out["seed"] is None:
        raise ConfigError(f"--seed is required for '{command}' (sampled output)")
    return out


def _prepare_model(cfg: dict):
    """Hamiltonian, spectral data, resolved tau, initial state."""
    if cfg["hamiltonian_file"] is not None:
        try:
            h = load_hamiltonian(cfg["hamiltonian_file"])
        except OSError as exc:
            raise ConfigError(f"cannot read hamiltonian file: {exc}")
        except ValueError as exc:
            raise ConfigError(f"bad hamiltonian file: {exc}")
    else:
        h = build_heisenberg_xyz(cfg["n"], cfg["jx"], cfg["jy"], cfg["jz"], cfg["h"])
    s = diagonalize(h)
    tau = resonance_tau(s.ground_energy) if cfg["tau"] == "auto" else cfg["tau"]
    init = cfg["initial_state"]
    if init == "neel":
        psi0 = init_basis(h.qubit_count, neel_index(h.qubit_count))
    elif init == "uniform":
        psi0 = uniform_state(h.qubit_count)
    else:
        if init >= (1 << h.qubit_count):
            raise ConfigError(f"basis index {init} out of range for {h.qubit_count} qubits")
        psi0 = init_basis(h.qubit_count, init)
    return h, s, tau, psi0


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(path: Path, resolved: dict) -> None:
    _write_json(path.with_name(path.stem + ".config.json"), resolved)
    print(f"wrote {path}")


def _trotter_config(cfg: dict) -> TrotterConfig:
    return TrotterConfig(order=cfg["trotter"]["order"], substeps=cfg["trotter"]["substeps"])


def cmd_spectrum(cfg: dict, out_dir: Path) -> None:
    h, s, tau, psi0 = _prepare_model(cfg)
    gap = spectral_gap(s, cfg["degeneracy_tol"])
    payload = {
        "eigenvalues": [float(v) for v in s.eigenvalues],
        "ground_energy": s.ground_energy,
        "gap": gap.gap,
        "gap_degenerate": gap.degenerate,
        "tau": tau,
        "ground_overlap": ground_overlap(psi0, s, cfg["degeneracy_tol"]),
    }
    path = out_dir / "spectrum.json"
    _write_json(path, payload)
    _emit(path, cfg)


def cmd_convergence(cfg: dict, out_dir: Path) -> None:
    h, s, tau, psi0 = _prepare_model(cfg)
    degrees = cfg["degrees"]
    fcfg = FilterConfig(tau=tau, degree=max(degrees), mode=cfg["mode"],
                        trotter=_trotter_config(cfg))
    trace = run_filter(psi0, h, s, fcfg, keep_states=cfg["shots"] > 0)

    sampled = cfg["shots"] > 0
    plan = plan_measurements(h, cfg["shots"]) if sampled else None
    header = ["degree", "energy", "fidelity"]
    if sampled:
        header += ["sampled_energy", "sampled_stderr"]
    header += ["cumulative_success_prob"]

    rows = []
    for d in degrees:
        rec = trace.records[d]
        row = [d, rec.energy, rec.fidelity]
        if sampled:
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=cfg["seed"], spawn_key=(3, d)))
            mean, stderr = sample_energy(trace.states[d], h, plan, rng)
            row += [mean, stderr]
        row += [rec.success_prob]
        rows.append(row)
    path = out_dir / "convergence.csv"
    _write_csv(path, header, rows)
    _emit(path, cfg)


def cmd_advantage(cfg: dict, out_dir: Path) -> None:
    h, s, tau, psi0 = _prepare_model(cfg)
    costs = cfg["degrees"]
    trotter = _trotter_config(cfg)
    fcfg = FilterConfig(tau=tau, degree=max(costs), mode=cfg["mode"], trotter=trotter)
    trace = run_filter(psi0, h, s, fcfg)

    rows = [["filter", d, 1.0 - trace.records[d].fidelity] for d in costs]
    h_init = transverse_field_start(h.qubit_count)
    for m in costs:
        if m == 0:
            start = uniform_state(h.qubit_count)
            infid = 1.0 - ground_overlap(start, s, cfg["degeneracy_tol"])
        else:
            tasp = run_tasp(h, s, TaspConfig(total_time=m * tau, steps=m,
                                             initial_hamiltonian=h_init, trotter=trotter))
            infid = 1.0 - tasp.records[-1].fidelity
        rows.append(["tasp", m, infid])
    path = out_dir / "advantage.csv"
    _write_csv(path, ["protocol", "cost", "infidelity"], rows)
    _emit(path, cfg)


def cmd_noisy(cfg: dict, out_dir: Path) -> None:
    h, s, tau, psi0 = _prepare_model(cfg)
    degrees = cfg["degrees"]
    dmax = max(degrees)
    trotter = _trotter_config(cfg)
    noise = NoiseModel(**cfg["noise"])
    n_traj = cfg["trajectories"]
    shots_per_traj = max(1, cfg["shots"] // n_traj)
    plan = plan_measurements(h, shots_per_traj)

    ideal = run_filter(psi0, h, s, FilterConfig(tau=tau, degree=dmax,
                                                mode="operator-exact"))
    fcfg = FilterConfig(tau=tau, degree=dmax, mode="circuit-trotter", trotter=trotter)
    sample_at = set(degrees)
    per_step: dict[int, list[float]] = {d: [] for d in degrees}
    survivors = {d: 0 for d in degrees}
    for t in range(n_traj):
        streams = tuple(
            np.random.default_rng(np.random.SeedSequence(entropy=cfg["seed"],
                                                         spawn_key=(4, t, k)))
            for k in range(3))
        traj = noisy_filter_trajectory(psi0, h, s, fcfg, noise,
                                       sample_shots=shots_per_traj, plan=plan,
                                       sample_at=sample_at, streams=streams)
        for rec in traj.records:
            if rec.step in sample_at and rec.sampled_energy is not None:
                per_step[rec.step].append(rec.sampled_energy)
                survivors[rec.step] += 1

    rows = []
    for d in degrees:
        vals = per_step[d]
        n_surv = survivors[d]
        mean = float(np.mean(vals)) if vals else math.nan
        stderr = float(np.std(vals, ddof=1) / math.sqrt(n_surv)) if n_surv > 1 else 0.0
        rows.append([d, mean, stderr, 1.0 - n_surv / n_traj, n_surv,
                     ideal.records[d].energy])
    path = out_dir / "noisy.csv"
    _write_csv(path, ["step", "mean_energy", "stderr", "abort_rate",
                      "n_trajectories", "ideal_energy"], rows)
    _emit(path, cfg)


def cmd_detune(cfg: dict, out_dir: Path) -> None:
    h, s, tau, psi0 = _prepare_model(cfg)
    del tau  # detuning is always measured relative to exact resonance
    e0 = s.ground_energy
    tau_res = resonance_tau(e0)
    deltas = np.linspace(0.0, cfg["deltas"]["max"], cfg["deltas"]["points"])
    degrees = cfg["detune_degrees"]

    rows = []
    for delta in deltas:
        tau_detuned = tau_res * (1.0 - delta)
        for d in degrees:
            exact = abs(predicted_amplitude(e0, tau_detuned, d)) ** 2
            approx = math.exp(-d * (math.pi * delta) ** 2)
            rel = abs(exact - approx) / max(exact, 1e-300)
            rows.append([float(delta), d, exact, approx, rel])
    path = out_dir / "detune.csv"
    _write_csv(path, ["delta", "degree", "survival_exact", "survival_approx",
                      "rel_error"], rows)
    _emit(path, cfg)

    tol_rows = [[d, detuning_tolerance(d, cfg["survival_floor"])] for d in degrees]
    tol_path = out_dir / "detune_tolerance.csv"
    _write_csv(tol_path, ["degree", "delta_star"], tol_rows)
    _emit(tol_path, cfg)


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "convergence": cmd_convergence,
    "advantage": cmd_advantage,
    "noisy": cmd_noisy,
    "detune": cmd_detune,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powercos",
        description="Ground-state filtering experiments (plot-ready CSV/JSON outputs)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="root seed for sampled outputs")
        p.add_argument("--out", help="output directory")
        p.add_argument("--hamiltonian-file", dest="hamiltonian_file",
                       help="text file of '<coefficient> <axes>' lines, overrides the built-in model")
        p.add_argument("--mode", help="filter execution mode")
        p.add_argument("--shots", type=int, help="total measurement shots")
        p.add_argument("--degrees", help="degree/cost sweep as 'a..b'")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args.config)
        for key in ("seed", "out", "hamiltonian_file", "mode", "shots", "degrees"):
            value = getattr(args, key, None)
            if value is not None:
                cfg[key] = value
        cfg = _validate(cfg, args.command)

        out_dir = Path(cfg["out"])
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {out_dir}: {exc}")
        if not os.access(out_dir, os.W_OK):
            raise ConfigError(f"output directory {out_dir} is not writable")

        _COMMANDS[args.command](cfg, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, PowercosError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
