"""Shot-based energy estimation and the parametric gate-noise trajectory.

Measurement settings are built by greedy qubit-wise-commuting grouping in
term order; for the benchmark spin chain this yields exactly three groups
(XX / YY / ZZ+Z).  Sampling draws basis-state outcomes from the exact
rotated distribution, so the estimator is unbiased by construction and the
reported stderr is the usual standard error of the per-group means combined
in quadrature.

Noise is Monte Carlo Pauli insertion on the statevector: after each
controlled term rotation (resp. each ancilla Hadamard) a depolarizing event
fires with the configured probability and applies a uniformly random
non-identity Pauli to a uniformly chosen involved qubit.  Readout errors
flip measured bits independently.  Randomness discipline: one root seed per
trajectory split into (gate noise, ancilla outcomes, measurement shots)
streams, and a probability of zero consumes no draws, so a zero-noise run is
bitwise identical to the noiseless sampled trajectory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from powercos import kernels
from powercos.errors import FilterAbort  # noqa: F401  (re-exported for callers)
from powercos.filtering import FilterConfig, FilterTrace, mcmr_trajectory, trajectory_streams
from powercos.pauli import Hamiltonian, PauliTerm
from powercos.spectral import SpectralData
from powercos.state import StateVector


@dataclass(frozen=True)
class MeasurementGroup:
    """Terms sharing one measurement setting plus their shot allocation."""

    basis: tuple[str, ...]  # per-qubit measurement axis, 'I' when unconstrained
    terms: tuple[PauliTerm, ...]
    shots: int


@dataclass(frozen=True)
class ShotPlan:
    shots: int
    groups: tuple[MeasurementGroup, ...]


@dataclass(frozen=True)
class NoiseModel:
    """Error probabilities: per controlled rotation, per 1q gate, per readout bit."""

    depolarizing_2q: float = 5e-3
    depolarizing_1q: float = 2e-4
    readout_flip: float = 1e-2

    def __post_init__(self):
        for name in ("depolarizing_2q", "depolarizing_1q", "readout_flip"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be a probability, got {p}")

    def is_zero(self) -> bool:
        return self.depolarizing_2q == 0.0 and self.depolarizing_1q == 0.0 \
            and self.readout_flip == 0.0


def plan_measurements(h: Hamiltonian, shots: int) -> ShotPlan:
    """Partition terms into qubit-wise-commuting groups and allocate shots.

    Greedy in term order: a term joins the first group whose fixed axes it
    matches.  Shots are split proportionally to each group's sum of absolute
    coefficients (floor), with the remainder going to the heaviest group.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = h.qubit_count
    bases: list[list[str]] = []
    members: list[list[PauliTerm]] = []
    for term in h.terms:
        placed = False
        for basis, group in zip(bases, members):
            ok = True
            for q, ch in enumerate(term.axes):
                if ch != "I" and basis[q] != "I" and basis[q] != ch:
                    ok = False
                    break
            if ok:
                for q, ch in enumerate(term.axes):
                    if ch != "I":
                        basis[q] = ch
                group.append(term)
                placed = True
                break
        if not placed:
            bases.append([ch if ch != "I" else "I" for ch in term.axes])
            members.append([term])

    weights = [sum(abs(t.coefficient) for t in group) for group in members]
    total = sum(weights)
    allocs = [int(math.floor(shots * w / total)) if total > 0 else 0 for w in weights]
    remainder = shots - sum(allocs)
    if allocs and remainder:
        allocs[max(range(len(weights)), key=lambda i: weights[i])] += remainder
    groups = tuple(
        MeasurementGroup(tuple(basis), tuple(group), alloc)
        for basis, group, alloc in zip(bases, members, allocs))
    return ShotPlan(shots=shots, groups=groups)


def _rotated_probabilities(state: StateVector, basis: tuple[str, ...]) -> np.ndarray:
    amps = state.amplitudes.copy()
    for q, axis in enumerate(basis):
        if axis == "X":
            kernels.apply_hadamard(amps, q)
        elif axis == "Y":
            kernels.scale_where_bit(amps, q, -1.0j)  # S-dagger, then H maps Y to Z
            kernels.apply_hadamard(amps, q)
    probs = amps.real * amps.real + amps.imag * amps.imag
    return probs / probs.sum()


def _sample_plan(state: StateVector, plan: ShotPlan, rng: np.random.Generator,
                 readout_flip: float = 0.0) -> tuple[float, float]:
    n = state.qubit_count
    mean = 0.0
    var_of_mean = 0.0
    for group in plan.groups:
        if not group.terms:
            continue
        if group.shots < 1:
            raise ValueError("nonempty measurement group allocated zero shots")
        probs = _rotated_probabilities(state, group.basis)
        outcomes = rng.choice(probs.size, size=group.shots, p=probs).astype(np.uint64)
        if readout_flip > 0.0:
            flips = (rng.random((group.shots, n)) < readout_flip).astype(np.uint64)
            bit_values = np.uint64(1) << np.arange(n, dtype=np.uint64)
            outcomes = outcomes ^ (flips @ bit_values)
        values = np.zeros(group.shots, dtype=np.float64)
        for term in group.terms:
            support = np.uint64(sum(1 << q for q, ch in enumerate(term.axes) if ch != "I"))
            parity = (np.bitwise_count(outcomes & support) & np.uint64(1)).astype(np.float64)
            values += term.coefficient * (1.0 - 2.0 * parity)
        mean += float(np.mean(values))
        if group.shots > 1:
            var_of_mean += float(np.var(values, ddof=1)) / group.shots
    return mean, math.sqrt(var_of_mean)


def sample_energy(state: StateVector, h: Hamiltonian, plan: ShotPlan,
                  seed) -> tuple[float, float]:
    """Estimated (mean, stderr) of <H> from finite sampling of the plan.

    `seed` may be an integer or a numpy Generator.  The state is normalised
    internally; groups are sampled in plan order for reproducibility.
    """
    planned = {t for g in plan.groups for t in g.terms}
    missing = [t for t in h.terms if t not in planned]
    if missing:
        raise ValueError(f"plan does not cover {len(missing)} Hamiltonian terms")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return _sample_plan(state.normalized(), plan, rng)


_PAULI_MASKS = {0: ("X", 1, 0, 0), 1: ("Y", 1, 1, 1), 2: ("Z", 0, 1, 0)}


def _insert_pauli(joint: np.ndarray, qubit: int, which: int) -> None:
    _, xbit, zbit, ny = _PAULI_MASKS[which]
    src = joint.copy()
    kernels.apply_pauli_term(src, joint, xbit << qubit, zbit << qubit, ny, 1.0)


def noisy_filter_trajectory(initial: StateVector, h: Hamiltonian, s: SpectralData,
                            cfg: FilterConfig, noise: NoiseModel, *,
                            sample_shots: int = 0, plan: ShotPlan | None = None,
                            sample_at=None, streams=None) -> FilterTrace:
    """One sampled filtering trajectory with Pauli-insertion gate noise.

    Requires a Trotterized circuit config (noise attaches to gates).  When
    `sample_shots` > 0 the per-step records additionally carry a sampled
    energy estimate (with readout flips) drawn from the measurement stream,
    at the steps listed in `sample_at` (default: every step).
    """
    if cfg.mode != "circuit-trotter":
        raise ValueError("gate noise needs mode 'circuit-trotter'")
    if streams is None:
        streams = trajectory_streams(cfg.seed)
    gate_rng = streams[0]

    p2 = noise.depolarizing_2q
    p1 = noise.depolarizing_1q

    def noise_hook(joint: np.ndarray, kind: str, qubits: tuple[int, ...]) -> None:
        p = p2 if kind == "2q" else p1
        if p <= 0.0:
            return
        if gate_rng.random() >= p:
            return
        qubit = qubits[int(gate_rng.integers(len(qubits)))]
        _insert_pauli(joint, qubit, int(gate_rng.integers(3)))

    record_extra = None
    if sample_shots > 0:
        the_plan = plan if plan is not None else plan_measurements(h, sample_shots)
        steps = None if sample_at is None else set(sample_at)

        def record_extra(st: StateVector, step: int, meas_rng):
            if steps is not None and step not in steps:
                return None
            mean, stderr = _sample_plan(st, the_plan, meas_rng,
                                        readout_flip=noise.readout_flip)
            return {"sampled_energy": mean, "sampled_stderr": stderr}

    hook = None if (p2 == 0.0 and p1 == 0.0) else noise_hook
    return mcmr_trajectory(initial, h, s, cfg, noise_hook=hook,
                           readout_flip=noise.readout_flip, streams=streams,
                           record_extra=record_extra)
