"""Complex statevector storage and elementary circuit operations.

Conventions (fixed across the whole package):

* little-endian indexing: qubit q is bit q of the basis-state index, so the
  ket label ``|b_{n-1} ... b_1 b_0>`` reads most-significant bit first;
* states may be unnormalised: the squared norm carries the cumulative
  post-selection weight, and observables normalise at evaluation time;
* the ancilla, when present, is always the highest-index qubit.
"""
from __future__ import annotations

import math

import numpy as np

from powercos import kernels
from powercos.errors import DegenerateStateError

# squared norms below this are treated as measure-zero branches
DEGENERATE_NORM2 = 1e-300


class StateVector:
    """Amplitudes over the 2**n computational basis states."""

    __slots__ = ("amplitudes", "qubit_count")

    def __init__(self, amplitudes, *, copy: bool = True):
        amps = np.array(amplitudes, dtype=np.complex128, copy=copy)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be a 1-D array")
        n = int(amps.size).bit_length() - 1
        if amps.size != (1 << n) or amps.size < 2:
            raise ValueError(f"dimension {amps.size} is not 2**n with n >= 1")
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        self.amplitudes = amps
        self.qubit_count = n

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes, copy=True)

    def squared_norm(self) -> float:
        a = self.amplitudes
        return float(np.sum(a.real * a.real + a.imag * a.imag))

    def require_weight(self) -> float:
        """Squared norm, raising if the state is a degenerate (zero) branch."""
        w = self.squared_norm()
        if w < DEGENERATE_NORM2:
            raise DegenerateStateError(f"state squared norm {w:.3e} below {DEGENERATE_NORM2:.0e}")
        return w

    def normalized(self) -> "StateVector":
        w = self.require_weight()
        return StateVector(self.amplitudes / math.sqrt(w), copy=False)

    def __repr__(self):
        return f"StateVector(qubits={self.qubit_count}, norm2={self.squared_norm():.6g})"


def init_basis(n: int, index: int) -> StateVector:
    """Computational basis state |index> on n qubits."""
    if n < 1:
        raise ValueError("need at least one qubit")
    if not 0 <= index < (1 << n):
        raise ValueError(f"basis index {index} out of range for {n} qubits")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps, copy=False)


def neel_index(n: int) -> int:
    """Index of the alternating basis state |0101...> (label read MSB first)."""
    return sum(1 << q for q in range(n) if (n - 1 - q) % 2 == 1)


def uniform_state(n: int) -> StateVector:
    """Equal-amplitude superposition of all basis states."""
    if n < 1:
        raise ValueError("need at least one qubit")
    dim = 1 << n
    return StateVector(np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128), copy=False)


def _check_qubit(state: StateVector, qubit: int) -> None:
    if not 0 <= qubit < state.qubit_count:
        raise ValueError(f"qubit {qubit} out of range for {state.qubit_count}-qubit state")


def hadamard(state: StateVector, qubit: int) -> StateVector:
    _check_qubit(state, qubit)
    out = state.amplitudes.copy()
    kernels.apply_hadamard(out, qubit)
    return StateVector(out, copy=False)


def project(state: StateVector, qubit: int, outcome: int) -> tuple[StateVector, float]:
    """Unnormalised post-measurement state and the outcome probability.

    The probability is relative to the input state's squared norm; the
    returned amplitudes keep their weight (mismatching branch zeroed only).
    """
    _check_qubit(state, qubit)
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    w = state.require_weight()
    out = state.amplitudes.copy()
    kept = kernels.project_outcome(out, qubit, outcome)
    return StateVector(out, copy=False), kept / w


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.qubit_count != b.qubit_count:
        raise ValueError("statevector dimensions differ")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity_to(state: StateVector, reference: StateVector) -> float:
    """|<reference|state>|^2 normalised on both sides (global-phase invariant)."""
    wa = state.require_weight()
    wb = reference.require_weight()
    ov = inner(reference, state)
    return float((ov.real * ov.real + ov.imag * ov.imag) / (wa * wb))


def attach_ancilla(system: StateVector) -> StateVector:
    """|0>_A (x) system, the ancilla becoming the highest-index qubit."""
    sys_amps = system.amplitudes
    out = np.zeros(2 * sys_amps.size, dtype=np.complex128)
    out[: sys_amps.size] = sys_amps
    return StateVector(out, copy=False)


def drop_ancilla(joint: StateVector, outcome: int = 0) -> StateVector:
    """Remove the highest-index qubit after it was projected onto `outcome`.

    The discarded branch must be exactly zero (as produced by `project`).
    """
    if joint.qubit_count < 2:
        raise ValueError("joint state has no system register to keep")
    half = joint.amplitudes.size // 2
    keep, other = (joint.amplitudes[:half], joint.amplitudes[half:])
    if outcome == 1:
        keep, other = other, keep
    if np.any(other != 0):
        raise ValueError("ancilla branch to discard still carries weight; project it first")
    return StateVector(keep, copy=True)
