"""The power-cosine ground-state filter and its analytic predictions.

One filter step realises (I + e^{-iH tau})/2 on the system register.  Four
execution modes cover the ladder from pure linear algebra to a sampled
hardware-style run:

* ``operator-exact``: apply the filtered eigenvalues directly in the
  eigenbasis (non-unitary, state stays unnormalised).
* ``circuit-exact-u``: ancilla circuit (Hadamard, controlled-U, Hadamard,
  project on 0) with the exact propagator.
* ``circuit-trotter``: same circuit with every term rotation controlled.
* ``mcmr-sampled``: Trotterized circuit with the ancilla outcome drawn from
  the branch probabilities; outcome 1 aborts the trajectory.  The state is
  renormalised after each measurement and the trace keeps the product of
  observed branch probabilities.

All analytic helpers (resonant time step, filtered amplitude, excited-state
decay, degree bound, detuning) are closed forms evaluated in double
precision.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from powercos import kernels
from powercos.errors import DegenerateStateError, FilterAbort, ResonanceError
from powercos.evolve import TrotterConfig, rotation_schedule
from powercos.pauli import Hamiltonian, expectation
from powercos.spectral import SpectralData, ground_overlap
from powercos.state import DEGENERATE_NORM2, StateVector

MODES = ("operator-exact", "circuit-exact-u", "circuit-trotter", "mcmr-sampled")

# warn when the initial state barely overlaps the ground manifold
OVERLAP_WARN_THRESHOLD = 1e-6


@dataclass(frozen=True)
class FilterConfig:
    tau: float
    degree: int
    mode: str = "operator-exact"
    trotter: TrotterConfig = field(default_factory=TrotterConfig)
    seed: int | None = None

    def __post_init__(self):
        if not (self.tau > 0.0):
            raise ValueError("tau must be positive")
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode == "mcmr-sampled" and self.seed is None:
            raise ValueError("mcmr-sampled mode needs a seed")

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "degree": self.degree,
            "mode": self.mode,
            "trotter": {"order": self.trotter.order, "substeps": self.trotter.substeps},
            "seed": self.seed,
        }


@dataclass(frozen=True)
class StepRecord:
    step: int
    energy: float
    fidelity: float
    success_prob: float
    sampled_energy: float | None = None
    sampled_stderr: float | None = None


@dataclass
class FilterTrace:
    """Per-step record of a filter (or baseline) run.

    ``success_prob`` is cumulative: squared-norm ratio in the deterministic
    modes, product of observed branch probabilities in trajectory mode.
    """

    records: list[StepRecord]
    final_state: StateVector
    config: dict
    protocol: str = "filter"
    aborted: bool = False
    abort_step: int | None = None
    states: list[StateVector] | None = None  # per-step copies when requested

    CSV_HEADER = "step,energy,fidelity,cumulative_success_prob"

    def csv_lines(self) -> list[str]:
        lines = [self.CSV_HEADER]
        for r in self.records:
            lines.append(f"{r.step},{r.energy:.17g},{r.fidelity:.17g},{r.success_prob:.17g}")
        return lines

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(self.csv_lines()) + "\n")

    def to_json_dict(self) -> dict:
        recs = []
        for r in self.records:
            rec = {"step": r.step, "energy": r.energy, "fidelity": r.fidelity,
                   "cumulative_success_prob": r.success_prob}
            if r.sampled_energy is not None:
                rec["sampled_energy"] = r.sampled_energy
                rec["sampled_stderr"] = r.sampled_stderr
            recs.append(rec)
        return {
            "protocol": self.protocol,
            "config": self.config,
            "aborted": self.aborted,
            "abort_step": self.abort_step,
            "final_state_norm2": self.final_state.squared_norm(),
            "records": recs,
        }

    def write_json(self, path) -> None:
        import json

        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def resonance_tau(e0: float) -> float:
    """Time step 2*pi/|e0| putting the ground phase on a full turn."""
    if abs(e0) <= 1e-9:
        raise ResonanceError(
            "resonant time step undefined for |E0| <= 1e-9; shift the spectrum "
            "or supply tau explicitly")
    return 2.0 * math.pi / abs(e0)


def trajectory_streams(seed: int):
    """Independent generators for (gate noise, ancilla outcomes, measurement shots).

    Stream k is PCG64 seeded with SeedSequence(entropy=seed, spawn_key=(k,)),
    so a root seed fixes all three streams and they never interleave.
    """
    if seed is None:
        raise ValueError("trajectory streams need a seed")
    return tuple(
        np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(k,)))
        for k in range(3)
    )


def _clip01(p: float) -> float:
    return 0.0 if p < 0.0 else (1.0 if p > 1.0 else p)


def _interfered_joint(sys_amps: np.ndarray, tau: float, *,
                      spectral: SpectralData | None = None,
                      schedule=None, noise_hook=None) -> np.ndarray:
    """Hadamard, controlled evolution, Hadamard on |0>_A (x) system."""
    dim = sys_amps.size
    anc = dim.bit_length() - 1
    joint = np.zeros(2 * dim, dtype=np.complex128)
    joint[:dim] = sys_amps
    kernels.apply_hadamard(joint, anc)
    if noise_hook is not None:
        noise_hook(joint, "1q", (anc,))
    upper = joint[dim:]
    if schedule is not None:
        for theta, xm, zm, ny, support in schedule:
            kernels.apply_pauli_rotation(upper, xm, zm, ny, theta)
            if noise_hook is not None:
                noise_hook(joint, "2q", support + (anc,))
    else:
        comps = spectral.eigenvectors.conj().T @ upper
        comps *= np.exp(-1j * spectral.eigenvalues * tau)
        upper[:] = spectral.eigenvectors @ comps
    kernels.apply_hadamard(joint, anc)
    if noise_hook is not None:
        noise_hook(joint, "1q", (anc,))
    return joint


def _branch_weights(joint: np.ndarray) -> tuple[float, float]:
    half = joint.size // 2
    lo = joint[:half]
    hi = joint[half:]
    w0 = float(np.sum(lo.real * lo.real + lo.imag * lo.imag))
    w1 = float(np.sum(hi.real * hi.real + hi.imag * hi.imag))
    return w0, w1


def filter_step(state: StateVector, h: Hamiltonian, s: SpectralData,
                cfg: FilterConfig, rng=None, *, _schedule=None) -> tuple[StateVector, float]:
    """One application of (I + e^{-iH tau})/2; returns (state, branch probability).

    Deterministic modes return the unnormalised post-selected state.  In
    ``mcmr-sampled`` mode the ancilla outcome is drawn from `rng` (defaulting
    to the config seed's ancilla stream), outcome 1 raises FilterAbort, and
    the returned state is renormalised.
    """
    w_in = state.require_weight()
    if cfg.mode == "operator-exact":
        comps = s.eigenvectors.conj().T @ state.amplitudes
        comps *= 0.5 * (1.0 + np.exp(-1j * s.eigenvalues * cfg.tau))
        out = StateVector(s.eigenvectors @ comps, copy=False)
        return out, _clip01(out.squared_norm() / w_in)

    if cfg.mode == "circuit-exact-u":
        joint = _interfered_joint(state.amplitudes, cfg.tau, spectral=s)
    else:
        schedule = _schedule if _schedule is not None \
            else rotation_schedule(h, cfg.tau, cfg.trotter)
        joint = _interfered_joint(state.amplitudes, cfg.tau, schedule=schedule)

    dim = state.amplitudes.size
    if cfg.mode == "mcmr-sampled":
        if rng is None:
            rng = trajectory_streams(cfg.seed)[1]
        w0, w1 = _branch_weights(joint)
        p0 = _clip01(w0 / (w0 + w1))
        if rng.random() >= p0:
            raise FilterAbort()
        if w0 < DEGENERATE_NORM2:
            raise DegenerateStateError("post-selected branch weight underflowed")
        return StateVector(joint[:dim] / math.sqrt(w0), copy=False), p0

    anc = state.qubit_count
    kept = kernels.project_outcome(joint, anc, 0)
    if kept < DEGENERATE_NORM2:
        raise DegenerateStateError("post-selected branch weight underflowed")
    return StateVector(joint[:dim], copy=True), _clip01(kept / w_in)


def _record(step: int, state: StateVector, h: Hamiltonian, s: SpectralData,
            success: float, extra: dict | None = None) -> StepRecord:
    return StepRecord(step=step,
                      energy=expectation(state, h),
                      fidelity=ground_overlap(state, s),
                      success_prob=success,
                      **(extra or {}))


def run_filter(initial: StateVector, h: Hamiltonian, s: SpectralData,
               cfg: FilterConfig, *, keep_states: bool = False) -> FilterTrace:
    """Apply the degree-d filter, recording energy/fidelity/success per step."""
    gamma = ground_overlap(initial, s)
    if gamma < OVERLAP_WARN_THRESHOLD:
        warnings.warn(
            f"initial ground overlap {gamma:.3e} is tiny; the filter has almost "
            "nothing to project onto", stacklevel=2)
    if cfg.mode == "mcmr-sampled":
        return mcmr_trajectory(initial, h, s, cfg, keep_states=keep_states)

    w0 = initial.require_weight()
    state = initial.copy()
    records = [_record(0, state, h, s, 1.0)]
    states = [state.copy()] if keep_states else None
    schedule = rotation_schedule(h, cfg.tau, cfg.trotter) \
        if cfg.mode == "circuit-trotter" else None
    for k in range(1, cfg.degree + 1):
        state, _ = filter_step(state, h, s, cfg, _schedule=schedule)
        records.append(_record(k, state, h, s, _clip01(state.squared_norm() / w0)))
        if states is not None:
            states.append(state.copy())
    return FilterTrace(records=records, final_state=state, config=cfg.to_dict(),
                       states=states)


def mcmr_trajectory(initial: StateVector, h: Hamiltonian, s: SpectralData,
                    cfg: FilterConfig, *, noise_hook=None, readout_flip: float = 0.0,
                    streams=None, record_extra=None,
                    keep_states: bool = False) -> FilterTrace:
    """Single sampled trajectory of the measure-and-reset filtering loop.

    Draw structure per step (all from the ancilla stream): one uniform for
    the outcome, plus one uniform for the readout flip only when
    ``readout_flip > 0``.  ``noise_hook(joint, kind, qubits)`` is invoked
    after every gate; ``record_extra(state, step, meas_rng)`` may attach
    sampled observables to the step record.  With no hooks and zero flip
    probability this is exactly the noiseless sampled mode.
    """
    if streams is None:
        streams = trajectory_streams(cfg.seed)
    _, anc_rng, meas_rng = streams

    state = initial.normalized()
    schedule = rotation_schedule(h, cfg.tau, cfg.trotter)
    dim = state.amplitudes.size

    def extra(st: StateVector, step: int):
        return record_extra(st, step, meas_rng) if record_extra is not None else None

    records = [_record(0, state, h, s, 1.0, extra(state, 0))]
    states = [state.copy()] if keep_states else None
    cum = 1.0
    aborted = False
    abort_step = None
    for k in range(1, cfg.degree + 1):
        joint = _interfered_joint(state.amplitudes, cfg.tau,
                                  schedule=schedule, noise_hook=noise_hook)
        w0, w1 = _branch_weights(joint)
        p0 = _clip01(w0 / (w0 + w1))
        outcome = 0 if anc_rng.random() < p0 else 1
        reported = outcome
        if readout_flip > 0.0 and anc_rng.random() < readout_flip:
            reported ^= 1
        if reported == 1:
            aborted = True
            abort_step = k
            break
        w_kept = w0 if outcome == 0 else w1
        if w_kept < DEGENERATE_NORM2:
            raise DegenerateStateError("post-selected branch weight underflowed")
        half = joint[:dim] if outcome == 0 else joint[dim:]
        state = StateVector(half / math.sqrt(w_kept), copy=True)
        cum = _clip01(cum * (p0 if outcome == 0 else 1.0 - p0))
        records.append(_record(k, state, h, s, cum, extra(state, k)))
        if states is not None:
            states.append(state.copy())
    return FilterTrace(records=records, final_state=state, config=cfg.to_dict(),
                       aborted=aborted, abort_step=abort_step, states=states)


def predicted_amplitude(ek: float, tau: float, d: int) -> complex:
    """Filtered amplitude of an eigencomponent at energy ek after d steps.

    Equals exp(-i d ek tau / 2) * cos(ek tau / 2)**d.
    """
    return (0.5 * (1.0 + cmath.exp(-1j * ek * tau))) ** d


def predicted_excited_decay(gap: float, tau: float, d: int) -> float:
    """Small-gap estimate exp(-d gap^2 tau^2 / 8) of the excited amplitude."""
    if gap < 0.0 or tau <= 0.0:
        raise ValueError("gap must be >= 0 and tau > 0")
    return math.exp(-d * (gap * tau) ** 2 / 8.0)


def degree_for_precision(gap: float, tau: float, epsilon: float) -> int:
    """Smallest degree whose predicted excited decay is at most epsilon."""
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must be in (0, 1]")
    x = gap * tau
    if x <= 0.0:
        raise ValueError("degree undefined for gap*tau = 0")
    d = math.ceil(8.0 * math.log(1.0 / epsilon) / (x * x))
    while predicted_excited_decay(gap, tau, d) > epsilon:  # absorb last-ulp rounding
        d += 1
    return d


def detuned_survival(delta: float, d: int) -> float:
    """Ground-amplitude survival exp(-d pi^2 delta^2 / 2) under relative detuning."""
    if not abs(delta) < 0.5:
        raise ValueError("relative detuning must satisfy |delta| < 0.5")
    return math.exp(-d * (math.pi * delta) ** 2 / 2.0)


def detuning_tolerance(d: int, survival_floor: float) -> float:
    """Detuning at which the survival amplitude drops to the floor; scales 1/sqrt(d)."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    if not 0.0 < survival_floor <= 1.0:
        raise ValueError("survival floor must be in (0, 1]")
    return math.sqrt(2.0 * math.log(1.0 / survival_floor) / (d * math.pi ** 2))


def with_degree(cfg: FilterConfig, degree: int) -> FilterConfig:
    """Copy of the config with a different degree (sweep helper)."""
    return replace(cfg, degree=degree)
