"""calcilab: numerical laboratory for a closed-cell intracellular calcium
model with three-timescale relaxation oscillations.

Subpackages map onto the analysis pipeline: parameter tiers (:mod:`.params`),
model evaluators (:mod:`.model`), stiff integration (:mod:`.integrate`),
slow-fast geometry (:mod:`.gspt`), relaxation cycles (:mod:`.cycles`),
bifurcation scans (:mod:`.bifurcation`) and blow-up charts (:mod:`.blowup`).
The hot kernels run on a compiled backend when available (see
``calcilab._core.BACKEND``).
"""

from ._core import BACKEND as kernel_backend
from .params import (DimensionalParams, DimensionlessParams, ScaledParams,
                     default_dimensional, default_dimensionless, default_scaled,
                     hat_scale, load_params, nondimensionalize)

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "DimensionalParams",
    "DimensionlessParams",
    "ScaledParams",
    "default_dimensional",
    "default_dimensionless",
    "default_scaled",
    "hat_scale",
    "load_params",
    "nondimensionalize",
    "__version__",
]
