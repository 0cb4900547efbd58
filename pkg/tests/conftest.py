"""Shared fixtures: a few evolved trajectories reused across test modules."""

import math
from types import SimpleNamespace

import numpy as np
import pytest

from nlwrad import evolve, init_from_profile, make_grid, make_params


def gaussian_run(d, p, dr, t_end, checkpoint_every, amplitude=1.0, mode="nonlinear"):
    params = make_params(d, p)
    grid = make_grid(dr, math.ceil(7.0 + t_end + 1.0))
    state = init_from_profile(lambda r: amplitude * math.exp(-r * r),
                              lambda r: 0.0, grid, params)
    traj = evolve(state, t_end, checkpoint_every, mode=mode)
    return SimpleNamespace(params=params, grid=grid, state=state, traj=traj,
                           full=traj.merged(traj.reflect()))


@pytest.fixture(scope="session")
def gauss3():
    """d=3, p=2.5 Gaussian to T=12 (time-symmetric data)."""
    return gaussian_run(3, 2.5, 1 / 64, 12.0, 0.25)


@pytest.fixture(scope="session")
def gauss4():
    """d=4, p=2.2 Gaussian to T=12."""
    return gaussian_run(4, 2.2, 1 / 64, 12.0, 0.25)


@pytest.fixture(scope="session")
def scatter3():
    """d=3, p=2.8 Gaussian to T=100 (scattering-range exponent)."""
    return gaussian_run(3, 2.8, 1 / 32, 100.0, 1.0)
