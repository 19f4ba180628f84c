"""Vectorised numpy amplitude kernels (pure-python backend).

All kernels operate on 1-D contiguous complex128 arrays in the little-endian
convention: qubit q is bit q of the basis-state index.  Index and phase
tables are memoised per (dimension, mask) so repeated application of the same
Pauli term, the hot path in trajectory sweeps, does no index arithmetic.

The compiled backend in `_speedups.pyx` implements the same signatures; both
are interchangeable through `powercos.kernels`.
"""
from __future__ import annotations

from functools import lru_cache
from math import cos, sin, sqrt

import numpy as np

BACKEND_NAME = "python"

_RSQRT2 = 1.0 / sqrt(2.0)
_YFAC = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)  # i**ny


@lru_cache(maxsize=1024)
def _indices(dim: int) -> np.ndarray:
    return np.arange(dim, dtype=np.uint64)


@lru_cache(maxsize=1024)
def _sign_table(dim: int, mask: int) -> np.ndarray:
    """(-1)**popcount(i & mask) for every index i, as float, treat read-only."""
    par = np.bitwise_count(_indices(dim) & np.uint64(mask)) & np.uint64(1)
    return 1.0 - 2.0 * par.astype(np.float64)


@lru_cache(maxsize=1024)
def _gather_table(dim: int, xmask: int, zmask: int):
    """(source indices i^xmask, phase signs at those sources), treat read-only."""
    src = _indices(dim) ^ np.uint64(xmask)
    signs = np.bitwise_count(src & np.uint64(zmask)) & np.uint64(1)
    return src, 1.0 - 2.0 * signs.astype(np.float64)


@lru_cache(maxsize=1024)
def _pair_table(dim: int, xmask: int, zmask: int):
    """Pair decomposition for an off-diagonal Pauli string, treat read-only.

    Returns (i, j, sign_i, sign_j) where j = i ^ xmask enumerates each
    amplitude pair once (bit hb of i clear, hb = highest bit of xmask).
    """
    hb = xmask.bit_length() - 1
    idx = _indices(dim)
    i = idx[(idx >> np.uint64(hb)) & np.uint64(1) == 0]
    j = i ^ np.uint64(xmask)
    sign = _sign_table(dim, zmask)
    return i, j, sign[i], sign[j]


@lru_cache(maxsize=256)
def _bit_split(dim: int, qubit: int):
    """(indices with bit clear, indices with bit set), treat read-only."""
    idx = _indices(dim)
    i0 = idx[(idx >> np.uint64(qubit)) & np.uint64(1) == 0]
    return i0, i0 | np.uint64(1 << qubit)


def apply_pauli_term(src: np.ndarray, dst: np.ndarray, xmask: int, zmask: int,
                     ny: int, coeff: complex) -> None:
    """dst = coeff * P src for the Pauli string encoded by (xmask, zmask, ny)."""
    gather, sign = _gather_table(len(src), xmask, zmask)
    np.multiply(src[gather], sign, out=dst)
    dst *= coeff * _YFAC[ny & 3]


def apply_pauli_rotation(amps: np.ndarray, xmask: int, zmask: int, ny: int,
                         theta: float) -> None:
    """In-place exp(-i theta P) on the amplitudes."""
    c, s = cos(theta), sin(theta)
    if xmask == 0:
        sign = _sign_table(len(amps), zmask)
        amps *= np.where(sign > 0, complex(c, -s), complex(c, s))
        return
    i, j, sign_i, sign_j = _pair_table(len(amps), xmask, zmask)
    mis = -1j * s * _YFAC[ny & 3]
    ai = amps[i]
    aj = amps[j]
    amps[i] = c * ai + mis * (sign_j * aj)
    amps[j] = c * aj + mis * (sign_i * ai)


def apply_hadamard(amps: np.ndarray, qubit: int) -> None:
    i0, i1 = _bit_split(len(amps), qubit)
    a = amps[i0]
    b = amps[i1]
    amps[i0] = (a + b) * _RSQRT2
    amps[i1] = (a - b) * _RSQRT2


def scale_where_bit(amps: np.ndarray, qubit: int, factor: complex) -> None:
    """Multiply every amplitude whose `qubit` bit is set by `factor`."""
    _, i1 = _bit_split(len(amps), qubit)
    amps[i1] *= factor


def project_outcome(amps: np.ndarray, qubit: int, outcome: int) -> float:
    """In-place projective measurement: zero the mismatching branch.

    Returns the squared norm of the kept branch (unnormalised probability
    weight); the caller divides by the input squared norm if needed.
    """
    i0, i1 = _bit_split(len(amps), qubit)
    keep, drop = (i0, i1) if outcome == 0 else (i1, i0)
    kept = amps[keep]
    weight = float(np.sum(kept.real * kept.real + kept.imag * kept.imag))
    amps[drop] = 0.0
    return weight
