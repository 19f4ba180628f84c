"""Trotterized adiabatic state preparation, the cost-matched baseline.

The interpolation H(s) = (1-s) H_init + s H_target follows a linear schedule
evaluated at step midpoints s_m = (m - 1/2) / M.  Each of the M steps evolves
for total_time / M, so with total_time = M * tau one step costs exactly one
filter step's evolution window and the two protocols share a cost axis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from powercos.evolve import TrotterConfig, trotter_evolve
from powercos.filtering import FilterTrace, _record
from powercos.pauli import Hamiltonian, PauliTerm, linear_combination
from powercos.spectral import SpectralData, diagonalize
from powercos.state import StateVector, uniform_state


def transverse_field_start(n: int) -> Hamiltonian:
    """-sum_i X_i, whose ground state |+...+> is a product of Hadamards."""
    terms = []
    for i in range(n):
        axes = ["I"] * n
        axes[i] = "X"
        terms.append(PauliTerm(-1.0, "".join(axes)))
    return Hamiltonian(n, terms)


@dataclass(frozen=True)
class TaspConfig:
    total_time: float
    steps: int
    initial_hamiltonian: Hamiltonian
    trotter: TrotterConfig = field(default_factory=TrotterConfig)
    initial_state: StateVector | None = None  # default: ground of initial_hamiltonian

    def __post_init__(self):
        if not (self.total_time > 0.0):
            raise ValueError("total_time must be positive")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")


def _resolve_start(cfg: TaspConfig) -> StateVector:
    if cfg.initial_state is not None:
        return cfg.initial_state.normalized()
    n = cfg.initial_hamiltonian.qubit_count
    if cfg.initial_hamiltonian == transverse_field_start(n):
        return uniform_state(n)
    ground = diagonalize(cfg.initial_hamiltonian).eigenvectors[:, 0]
    return StateVector(ground, copy=True)


def run_tasp(target: Hamiltonian, s_target: SpectralData, cfg: TaspConfig) -> FilterTrace:
    """Adiabatic sweep into `target`, traced against its exact ground manifold.

    Records share the filter-trace schema; the protocol is unitary, so the
    cumulative success probability is identically 1.
    """
    if cfg.initial_hamiltonian.qubit_count != target.qubit_count:
        raise ValueError("initial and target Hamiltonians act on different registers")
    state = _resolve_start(cfg)
    records = [_record(0, state, target, s_target, 1.0)]
    dt = cfg.total_time / cfg.steps
    for m in range(1, cfg.steps + 1):
        s = (m - 0.5) / cfg.steps
        h_mid = linear_combination([(1.0 - s, cfg.initial_hamiltonian), (s, target)])
        state = trotter_evolve(state, h_mid, dt, cfg.trotter)
        records.append(_record(m, state, target, s_target, 1.0))
    config = {
        "total_time": cfg.total_time,
        "steps": cfg.steps,
        "trotter": {"order": cfg.trotter.order, "substeps": cfg.trotter.substeps},
    }
    return FilterTrace(records=records, final_state=state, config=config, protocol="tasp")
