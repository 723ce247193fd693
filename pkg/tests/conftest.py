import numpy as np
import pytest

from calcilab import cycles, default_scaled


@pytest.fixture(scope="session")
def sp():
    return default_scaled()


@pytest.fixture(scope="session")
def table3_cycle(sp):
    """The relaxation cycle at the shipped scaled defaults (shared: ~seconds)."""
    return cycles.find_limit_cycle(sp)


@pytest.fixture(scope="session")
def eps_sweep(sp):
    """Convergence sweep over the prescribed eps ladder (shared: ~minute)."""
    return cycles.eps_convergence_sweep(sp, [1e-3, 2.5e-3, 5e-3, 1e-2])


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(42)
