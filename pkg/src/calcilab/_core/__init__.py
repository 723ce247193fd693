"""Kernel backend selection: compiled extension if available, else pure Python.

Set ``CALCILAB_FORCE_PURE=1`` to skip the compiled extension (used by the
benchmark and the backend-agreement tests).
"""

import os

from . import _kernels_py

if os.environ.get("CALCILAB_FORCE_PURE"):
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _kernels_py

BACKEND = kernels.BACKEND

po_scaled = kernels.po_scaled
rhs_scaled = kernels.rhs_scaled
divergence_scaled = kernels.divergence_scaled
rhs_scaled_with_div = kernels.rhs_scaled_with_div

__all__ = [
    "BACKEND",
    "kernels",
    "po_scaled",
    "rhs_scaled",
    "divergence_scaled",
    "rhs_scaled_with_div",
]
