"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time), so any build failure here downgrades
to a warning instead of aborting the install.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/calcilab/_core/_kernels.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "cdivision": True},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    warnings.warn(f"Cython kernel build skipped ({exc}); using pure-Python fallback")

setup(ext_modules=ext_modules)
