"""Time-evolution propagators: exact (eigenbasis) and Trotterized.

The Trotter product uses the Hamiltonian's construction order; the order-2
variant applies half-angle rotations forward then reversed (Strang
splitting).  Controlled propagation exploits the ancilla-highest convention:
the ancilla-1 branch is the contiguous upper half of the amplitude array, so
controlling a term rotation is just applying it to that half.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from powercos import kernels
from powercos.pauli import Hamiltonian
from powercos.spectral import SpectralData
from powercos.state import StateVector


@dataclass(frozen=True)
class TrotterConfig:
    order: int = 2
    substeps: int = 8

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError("trotter order must be 1 or 2")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")


def rotation_schedule(h: Hamiltonian, t: float, cfg: TrotterConfig):
    """Flattened list of term rotations realising the Trotterized e^{-iHt}.

    Entries are (theta, xmask, zmask, ny, support_qubits); applying
    exp(-i theta P) in order reproduces trotter_evolve exactly.
    """
    dt = t / cfg.substeps
    base = []
    for term in h.terms:
        xm, zm, ny = term.masks()
        support = tuple(q for q, ch in enumerate(term.axes) if ch != "I")
        base.append((term.coefficient * dt, xm, zm, ny, support))
    if cfg.order == 1:
        one_pass = base
    else:
        halves = [(th / 2.0, xm, zm, ny, sup) for th, xm, zm, ny, sup in base]
        one_pass = halves + halves[::-1]
    return one_pass * cfg.substeps


def exact_evolve(state: StateVector, s: SpectralData, t: float) -> StateVector:
    """e^{-iHt} |psi> through the eigenbasis."""
    if state.amplitudes.size != s.dimension:
        raise ValueError("state dimension does not match the decomposition")
    comps = s.eigenvectors.conj().T @ state.amplitudes
    comps *= np.exp(-1j * s.eigenvalues * t)
    return StateVector(s.eigenvectors @ comps, copy=False)


def trotter_evolve(state: StateVector, h: Hamiltonian, t: float,
                   cfg: TrotterConfig) -> StateVector:
    if h.qubit_count != state.qubit_count:
        raise ValueError("operator and state qubit counts differ")
    out = state.amplitudes.copy()
    for theta, xm, zm, ny, _ in rotation_schedule(h, t, cfg):
        kernels.apply_pauli_rotation(out, xm, zm, ny, theta)
    return StateVector(out, copy=False)


def controlled_evolve(joint: StateVector, tau: float, *,
                      spectral: SpectralData | None = None,
                      hamiltonian: Hamiltonian | None = None,
                      trotter: TrotterConfig | None = None) -> StateVector:
    """Ancilla-controlled propagation of the system register.

    The ancilla is the highest-index qubit of `joint`.  Exact mode (default)
    needs the system `spectral` data; passing `trotter` (with `hamiltonian`)
    instead controls every term rotation individually.
    """
    if joint.qubit_count < 2:
        raise ValueError("joint state must contain an ancilla and a system register")
    out = joint.amplitudes.copy()
    upper = out[out.size // 2:]
    if trotter is None:
        if spectral is None:
            raise ValueError("exact mode needs the system spectral data")
        if upper.size != spectral.dimension:
            raise ValueError("system dimension does not match the decomposition")
        comps = spectral.eigenvectors.conj().T @ upper
        comps *= np.exp(-1j * spectral.eigenvalues * tau)
        upper[:] = spectral.eigenvectors @ comps
    else:
        if hamiltonian is None:
            raise ValueError("trotter mode needs the Hamiltonian")
        if upper.size != (1 << hamiltonian.qubit_count):
            raise ValueError("system dimension does not match the Hamiltonian")
        for theta, xm, zm, ny, _ in rotation_schedule(hamiltonian, tau, trotter):
            kernels.apply_pauli_rotation(upper, xm, zm, ny, theta)
    return StateVector(out, copy=False)
