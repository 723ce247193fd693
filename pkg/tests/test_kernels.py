"""Backend agreement: the compiled kernels must match the pure-Python twin."""

import numpy as np
import pytest

from calcilab._core import _kernels_py

try:
    from calcilab._core import _kernels as _compiled
except ImportError:
    _compiled = None

ARGS = (0.0025, 0.4, 0.1, 0.1, 0.1, 0.18, 0.025, 1.0, 5.5, 0.34, 0.8, 3.24, 0.0076)


@pytest.mark.skipif(_compiled is None, reason="compiled kernels unavailable")
def test_backends_agree_to_last_ulp(rng):
    for _ in range(500):
        h = rng.uniform(0.0, 1.2)
        c = rng.uniform(-1e-12, 1.5)
        a = _kernels_py.rhs_scaled(h, c, *ARGS)
        b = _compiled.rhs_scaled(h, c, *ARGS)
        assert a == b  # identical operation order -> bit-identical
        pa = _kernels_py.po_scaled(h, c, 0.0025, 0.4, 0.1, 0.1, 0.025, 0.8)
        pb = _compiled.po_scaled(h, c, 0.0025, 0.4, 0.1, 0.1, 0.025, 0.8)
        assert pa == pb
        da = _kernels_py.divergence_scaled(h, c, *ARGS)
        db = _compiled.divergence_scaled(h, c, *ARGS)
        assert da == db


def test_with_div_consistent():
    out = _kernels_py.rhs_scaled_with_div(0.5, 0.5, *ARGS)
    rhs = _kernels_py.rhs_scaled(0.5, 0.5, *ARGS)
    div = _kernels_py.divergence_scaled(0.5, 0.5, *ARGS)
    assert out == (*rhs, div)


def test_negative_c_clipped():
    a = _kernels_py.rhs_scaled(0.5, -1e-13, *ARGS)
    assert np.isfinite(a).all()
