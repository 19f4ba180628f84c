"""Real-weighted Pauli-string Hamiltonians and the spin-chain builder.

A Pauli string is a plain str over the axis letters I, X, Y, Z with one
character per qubit, character q acting on qubit q (little-endian, matching
`powercos.state`).  Ket labels in docs read MSB first; axes strings read
qubit 0 first.  Keeping both conventions straight is exactly why they are
written down here once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from powercos import kernels
from powercos.errors import ResourceLimitError
from powercos.state import StateVector

AXES = "IXYZ"

# dense matrices stay below this many system qubits (4096-dim)
DENSE_QUBIT_CAP = 12

_PAULI_1Q = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string; the coefficient is real (Hermiticity)."""

    coefficient: float
    axes: str

    def __post_init__(self):
        if isinstance(self.coefficient, complex):
            raise ValueError("coefficients must be real")
        object.__setattr__(self, "coefficient", float(self.coefficient))
        if not math.isfinite(self.coefficient):
            raise ValueError("coefficients must be finite")
        if not self.axes or any(ch not in AXES for ch in self.axes):
            raise ValueError(f"axes string {self.axes!r} must be non-empty over {AXES}")

    def masks(self) -> tuple[int, int, int]:
        """(xmask, zmask, y count) encoding for the amplitude kernels."""
        xm = zm = ny = 0
        for q, ch in enumerate(self.axes):
            if ch in "XY":
                xm |= 1 << q
            if ch in "YZ":
                zm |= 1 << q
            if ch == "Y":
                ny += 1
        return xm, zm, ny


class Hamiltonian:
    """Sum of Pauli terms over a fixed qubit count, canonicalised at build.

    Duplicate strings are merged by summing coefficients and exact zeros are
    dropped, so structurally equal operators compare equal.  Instances are
    immutable by convention and safe to share.
    """

    __slots__ = ("qubit_count", "terms")

    def __init__(self, qubit_count: int, terms):
        if qubit_count < 1:
            raise ValueError("qubit_count must be positive")
        merged: dict[str, float] = {}
        for term in terms:
            if not isinstance(term, PauliTerm):
                term = PauliTerm(*term)
            if len(term.axes) != qubit_count:
                raise ValueError(
                    f"term {term.axes!r} has length {len(term.axes)}, expected {qubit_count}")
            merged[term.axes] = merged.get(term.axes, 0.0) + term.coefficient
        self.qubit_count = qubit_count
        self.terms = tuple(PauliTerm(c, ax) for ax, c in merged.items() if c != 0.0)

    def __eq__(self, other):
        return (isinstance(other, Hamiltonian)
                and self.qubit_count == other.qubit_count
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.qubit_count, self.terms))

    def __repr__(self):
        return f"Hamiltonian(qubits={self.qubit_count}, terms={len(self.terms)})"


def build_heisenberg_xyz(n: int, jx: float, jy: float, jz: float, h: float) -> Hamiltonian:
    """Open-boundary spin chain: nearest-neighbour XX, YY, ZZ couplings plus a Z field.

    Term order is the one the Trotter decomposition uses: all XX pairs left to
    right, then YY, then ZZ, then the single-site Z terms.  Couplings that are
    exactly zero produce no terms.
    """
    if n < 2:
        raise ValueError("chain needs at least 2 sites")
    terms = []
    for letter, coupling in (("X", jx), ("Y", jy), ("Z", jz)):
        if coupling == 0.0:
            continue
        for i in range(n - 1):
            axes = ["I"] * n
            axes[i] = letter
            axes[i + 1] = letter
            terms.append(PauliTerm(coupling, "".join(axes)))
    if h != 0.0:
        for i in range(n):
            axes = ["I"] * n
            axes[i] = "Z"
            terms.append(PauliTerm(h, "".join(axes)))
    return Hamiltonian(n, terms)


def linear_combination(weighted: list[tuple[float, Hamiltonian]]) -> Hamiltonian:
    """Weighted sum of Hamiltonians over the same register (terms merged)."""
    if not weighted:
        raise ValueError("empty combination")
    n = weighted[0][1].qubit_count
    terms = []
    for w, h in weighted:
        if h.qubit_count != n:
            raise ValueError("qubit counts differ")
        terms.extend(PauliTerm(w * t.coefficient, t.axes) for t in h.terms)
    return Hamiltonian(n, terms)


def to_dense(h: Hamiltonian) -> np.ndarray:
    """Dense Hermitian matrix of the operator (little-endian index order)."""
    if h.qubit_count > DENSE_QUBIT_CAP:
        raise ResourceLimitError(
            f"dense matrix for {h.qubit_count} qubits exceeds the cap of {DENSE_QUBIT_CAP}")
    dim = 1 << h.qubit_count
    out = np.zeros((dim, dim), dtype=np.complex128)
    for term in h.terms:
        m = np.ones((1, 1), dtype=np.complex128)
        for q in range(h.qubit_count - 1, -1, -1):
            m = np.kron(m, _PAULI_1Q[term.axes[q]])
        out += term.coefficient * m
    return out


def apply_term(state: StateVector, term: PauliTerm) -> StateVector:
    """coefficient * (Pauli string applied to state), via the bit-index kernel."""
    if len(term.axes) != state.qubit_count:
        raise ValueError(
            f"term on {len(term.axes)} qubits applied to {state.qubit_count}-qubit state")
    xm, zm, ny = term.masks()
    dst = np.empty_like(state.amplitudes)
    kernels.apply_pauli_term(state.amplitudes, dst, xm, zm, ny, term.coefficient)
    return StateVector(dst, copy=False)


def expectation(state: StateVector, h: Hamiltonian) -> float:
    """<psi|H|psi> / <psi|psi>, accumulated term by term."""
    if h.qubit_count != state.qubit_count:
        raise ValueError("operator and state qubit counts differ")
    w = state.require_weight()
    src = state.amplitudes
    dst = np.empty_like(src)
    acc = 0.0
    for term in h.terms:
        xm, zm, ny = term.masks()
        kernels.apply_pauli_term(src, dst, xm, zm, ny, term.coefficient)
        acc += np.vdot(src, dst).real
    return acc / w


def format_hamiltonian(h: Hamiltonian) -> str:
    """One term per line: `<coefficient> <axes>`, axes qubit 0 first."""
    return "".join(f"{term.coefficient!r} {term.axes}\n" for term in h.terms)


def parse_hamiltonian(text: str) -> Hamiltonian:
    """Inverse of `format_hamiltonian`; blank lines and `#` comments allowed."""
    terms = []
    n = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<coefficient> <axes>', got {raw!r}")
        try:
            coeff = float(parts[0])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad coefficient {parts[0]!r}") from exc
        axes = parts[1].upper()
        if n is None:
            n = len(axes)
        elif len(axes) != n:
            raise ValueError(f"line {lineno}: axes length {len(axes)} != {n}")
        terms.append(PauliTerm(coeff, axes))
    if n is None:
        raise ValueError("no terms found")
    return Hamiltonian(n, terms)


def load_hamiltonian(path) -> Hamiltonian:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_hamiltonian(fh.read())


def save_hamiltonian(h: Hamiltonian, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_hamiltonian(h))
