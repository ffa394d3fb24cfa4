import numpy as np
import pytest

from camsel.config import default_config_path, load_scenario
from camsel.scenario import CameraSpec, CorrelationMatrix, Scenario

BETA_A = [6, 6, 6, 2, 2.5, 3.5, 5]
BETA_B = [3, 3, 3, 3, 3.5, 2.5, 2]


def fleet_cameras():
    sizes = [(1920, 1080)] * 3 + [(1280, 720)] * 4
    return tuple(CameraSpec(i, w, h, BETA_A[i], BETA_B[i]) for i, (w, h) in enumerate(sizes))


def correlated_high_res(high=0.8, other=0.1, n=7, n_high=3):
    m = np.full((n, n), other)
    m[:n_high, :n_high] = high
    np.fill_diagonal(m, 1.0)
    return CorrelationMatrix(m)


@pytest.fixture
def shipped():
    return load_scenario(default_config_path())


@pytest.fixture
def fleet_scenario():
    return Scenario(fleet_cameras(), correlated_high_res(), theta=1036800, psi=4)
