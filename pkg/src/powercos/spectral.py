"""Dense Hermitian eigen-decomposition: ground energy, gap, overlaps.

Backed by LAPACK via numpy.linalg.eigh, which is deterministic for a fixed
build; eigenvector phases are additionally pinned (largest-magnitude
component made real positive) so downstream golden files never depend on
LAPACK's phase freedom.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from powercos.errors import NumericalError
from powercos.pauli import Hamiltonian, to_dense
from powercos.state import StateVector

DEFAULT_DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues ascending; eigenvectors as matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dimension(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])


def diagonalize_matrix(matrix: np.ndarray) -> SpectralData:
    """Full eigen-decomposition of a Hermitian matrix with pinned phases."""
    matrix = np.asarray(matrix)
    hermiticity = float(np.max(np.abs(matrix - matrix.conj().T), initial=0.0))
    scale = float(np.max(np.abs(matrix), initial=0.0))
    if hermiticity > 1e-12 * max(scale, 1.0):
        raise ValueError(f"matrix is not Hermitian (max asymmetry {hermiticity:.3e})")
    try:
        vals, vecs = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigensolver failed on {matrix.shape[0]}x{matrix.shape[1]} matrix "
            f"(norm {scale:.3e}): {exc}") from exc
    vecs = np.array(vecs, dtype=np.complex128)
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        pivot = int(np.argmax(np.abs(col)))
        ph = col[pivot]
        mag = abs(ph)
        if mag > 0.0:
            col *= ph.conjugate() / mag
    return SpectralData(eigenvalues=vals.astype(np.float64), eigenvectors=vecs)


def diagonalize(h: Hamiltonian) -> SpectralData:
    return diagonalize_matrix(to_dense(h))


class GapInfo(NamedTuple):
    gap: float
    degenerate: bool  # True when the whole spectrum sits within tol of E0


def spectral_gap(s: SpectralData, degeneracy_tol: float = DEFAULT_DEGENERACY_TOL) -> GapInfo:
    """Smallest excitation energy above the (possibly degenerate) ground level."""
    if s.dimension < 2:
        raise ValueError("need at least two eigenvalues")
    diffs = s.eigenvalues - s.eigenvalues[0]
    above = diffs[diffs > degeneracy_tol]
    if above.size == 0:
        return GapInfo(0.0, True)
    return GapInfo(float(above[0]), False)


def ground_manifold(s: SpectralData, degeneracy_tol: float = DEFAULT_DEGENERACY_TOL) -> np.ndarray:
    """Columns spanning the ground level (eigenvalues within tol of E0)."""
    count = int(np.sum(s.eigenvalues - s.eigenvalues[0] <= degeneracy_tol))
    return s.eigenvectors[:, :count]


def ground_overlap(state: StateVector, s: SpectralData,
                   degeneracy_tol: float = DEFAULT_DEGENERACY_TOL) -> float:
    """Squared overlap with the ground manifold, normalised by the state weight."""
    if state.amplitudes.size != s.dimension:
        raise ValueError("state dimension does not match the decomposition")
    w = state.require_weight()
    basis = ground_manifold(s, degeneracy_tol)
    comps = basis.conj().T @ state.amplitudes
    return float(np.sum(comps.real * comps.real + comps.imag * comps.imag) / w)
