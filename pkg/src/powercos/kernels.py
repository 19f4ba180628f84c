"""Backend selection for the amplitude kernels.

The compiled extension (`powercos._speedups`, built from Cython at install
time) is preferred; the vectorised numpy implementation is the fallback.
Set ``POWERCOS_PURE_PYTHON=1`` to force the fallback, e.g. for benchmarking
or debugging.  Both backends implement identical semantics; a fixed backend
gives bitwise-reproducible results.
"""
from __future__ import annotations

import importlib
import os

from powercos import _pykernels

if os.environ.get("POWERCOS_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from powercos import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND_NAME

apply_pauli_term = _impl.apply_pauli_term
apply_pauli_rotation = _impl.apply_pauli_rotation
apply_hadamard = _impl.apply_hadamard
scale_where_bit = _impl.scale_where_bit
project_outcome = _impl.project_outcome


def available_backends() -> list[str]:
    names = ["python"]
    try:
        importlib.import_module("powercos._speedups")
        names.append("compiled")
    except ImportError:
        pass
    return names


def load_backend(name: str):
    """Import a specific backend module ("python" or "compiled")."""
    if name == "python":
        return _pykernels
    if name == "compiled":
        return importlib.import_module("powercos._speedups")
    raise ValueError(f"unknown kernel backend {name!r}")
