"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension (a vectorised numpy
backend is selected at import time); compiling `powercos._speedups` just makes
the amplitude kernels much faster for trajectory-heavy workloads.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-python install still works
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext = Extension(
        "powercos._speedups",
        sources=["src/powercos/_speedups.pyx"],
        optional=True,
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
