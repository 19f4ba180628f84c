# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled amplitude kernels (scalar loops, no numpy API).

Mirrors the signatures of `_pykernels`; `powercos.kernels` picks whichever
backend is available at import time.  Little-endian convention throughout:
qubit q is bit q of the basis-state index.
"""

from libc.math cimport cos, sin, sqrt

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

ctypedef double complex cplx

BACKEND_NAME = "compiled"

cdef double _RSQRT2 = 1.0 / sqrt(2.0)


cdef inline cplx _yfac(int ny) noexcept nogil:
    ny &= 3
    if ny == 0:
        return 1.0
    if ny == 1:
        return 1.0j
    if ny == 2:
        return -1.0
    return -1.0j


def apply_pauli_term(const cplx[::1] src, cplx[::1] dst, unsigned long long xmask,
                     unsigned long long zmask, int ny, cplx coeff):
    """dst = coeff * P src for the Pauli string encoded by (xmask, zmask, ny)."""
    cdef Py_ssize_t dim = src.shape[0]
    cdef Py_ssize_t i
    cdef unsigned long long j
    cdef cplx base = coeff * _yfac(ny)
    with nogil:
        for i in range(dim):
            j = (<unsigned long long> i) ^ xmask
            if __builtin_popcountll(j & zmask) & 1:
                dst[i] = -base * src[<Py_ssize_t> j]
            else:
                dst[i] = base * src[<Py_ssize_t> j]


def apply_pauli_rotation(cplx[::1] amps, unsigned long long xmask,
                         unsigned long long zmask, int ny, double theta):
    """In-place exp(-i theta P) on the amplitudes."""
    cdef Py_ssize_t dim = amps.shape[0]
    cdef double c = cos(theta)
    cdef double s = sin(theta)
    cdef cplx fplus = c - 1.0j * s   # eigenvalue +1 branch
    cdef cplx fminus = c + 1.0j * s
    cdef cplx mis, ai, aj, phi, phj
    cdef Py_ssize_t base, off, i, jj, step, stride
    cdef unsigned long long j
    cdef int hb

    if xmask == 0:
        with nogil:
            for i in range(dim):
                if __builtin_popcountll((<unsigned long long> i) & zmask) & 1:
                    amps[i] = amps[i] * fminus
                else:
                    amps[i] = amps[i] * fplus
        return

    hb = 0
    while (xmask >> (hb + 1)) != 0:
        hb += 1
    step = (<Py_ssize_t> 1) << hb
    stride = 2 * step
    mis = -1.0j * s * _yfac(ny)
    with nogil:
        base = 0
        while base < dim:
            for off in range(step):
                i = base + off
                j = (<unsigned long long> i) ^ xmask
                jj = <Py_ssize_t> j
                phj = -mis if (__builtin_popcountll(j & zmask) & 1) else mis
                phi = -mis if (__builtin_popcountll((<unsigned long long> i) & zmask) & 1) else mis
                ai = amps[i]
                aj = amps[jj]
                amps[i] = c * ai + phj * aj
                amps[jj] = c * aj + phi * ai
            base += stride


def apply_hadamard(cplx[::1] amps, int qubit):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t step = (<Py_ssize_t> 1) << qubit
    cdef Py_ssize_t stride = 2 * step
    cdef Py_ssize_t base, off, i
    cdef cplx a, b
    with nogil:
        base = 0
        while base < dim:
            for off in range(step):
                i = base + off
                a = amps[i]
                b = amps[i + step]
                amps[i] = (a + b) * _RSQRT2
                amps[i + step] = (a - b) * _RSQRT2
            base += stride


def scale_where_bit(cplx[::1] amps, int qubit, cplx factor):
    """Multiply every amplitude whose `qubit` bit is set by `factor`."""
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t step = (<Py_ssize_t> 1) << qubit
    cdef Py_ssize_t stride = 2 * step
    cdef Py_ssize_t base, off
    with nogil:
        base = 0
        while base < dim:
            for off in range(step):
                amps[base + step + off] = amps[base + step + off] * factor
            base += stride


def project_outcome(cplx[::1] amps, int qubit, int outcome) -> float:
    """In-place projective measurement: zero the mismatching branch.

    Returns the squared norm of the kept branch (unnormalised probability
    weight); the caller divides by the input squared norm if needed.
    """
    cdef Py_ssize_t dim = amps.shape[0]
    cdef double weight = 0.0
    cdef Py_ssize_t i
    cdef cplx a
    with nogil:
        for i in range(dim):
            if (((<unsigned long long> i) >> qubit) & 1) == <unsigned long long> outcome:
                a = amps[i]
                weight += a.real * a.real + a.imag * a.imag
            else:
                amps[i] = 0.0
    return weight
