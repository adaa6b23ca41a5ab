"""Shared pytest fixtures for the resilgrid test suite."""
import numpy as np
import pytest

from resilgrid.core.cyber_game.dto import CyberGameSpec
from resilgrid.core.epidemic.model import scale_free_distribution
from resilgrid.core.grid.case_io import load_bundled_case
from resilgrid.core.grid.discrete import discretize, operating_point
from resilgrid.core.grid.dto import Branch, BusSystem, Generator, Load
from resilgrid.core.grid.model import build_continuous
from resilgrid.core.physical_game.dto import GameWeights, case_study_weights


@pytest.fixture
def dist_100():
    """Scale-free degrees on [1, 100]."""
    return scale_free_distribution(1, 100)


@pytest.fixture
def base_spec():
    """γ = √u_d + 0.1, ζ = 2.5·log(u_a + 1) + 0.1, C = 0.2u², d_min = 1."""
    return CyberGameSpec()


@pytest.fixture
def toy_system():
    """One generator, one load, unit parameters, the load is vulnerable."""
    return BusSystem(
        name="toy",
        generators=[Generator(bus=1, inertia=1.0, damping=1.0, kp=1.0, ki=1.0)],
        loads=[Load(bus=2, damping=1.0, secure_load=0.5)],
        branches=[Branch(from_bus=1, to_bus=2, susceptance=1.0)],
        vulnerable_buses=[2],
        rho={2: 1.0},
    )


@pytest.fixture
def toy_grid(toy_system):
    return discretize(build_continuous(toy_system), 0.1)


@pytest.fixture
def toy_weights():
    return GameWeights(
        Q=np.eye(3),
        Q_f=np.eye(3),
        R_d=np.array([1.0]),
        R_a=np.array([10.0]),
        attack_index=np.array([0]),
        load_caps=np.array([5.0]),
        horizon=10,
        mu=2.0,
        alpha=5.0,
        n_max=3,
    )


@pytest.fixture
def toy_x0(toy_grid):
    """Operating point with a 0.3 rad/s speed offset."""
    x0 = operating_point(toy_grid)
    x0[2] += 0.3
    return x0


@pytest.fixture(scope="session")
def ieee39():
    return load_bundled_case("ieee39")


@pytest.fixture(scope="session")
def ieee39_grid(ieee39):
    return discretize(build_continuous(ieee39), 0.1)


@pytest.fixture(scope="session")
def ieee39_weights(ieee39):
    """Case-study weights with the stage-1 caps (R̄ ≈ 166 p.u. over 8 buses)."""
    return case_study_weights(ieee39, ieee39.load_caps(166.4))
