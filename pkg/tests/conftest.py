import numpy as np
import pytest

from fluidlight.rates import ArrivalRealization, ServiceConfig


def constant_arrival(horizon, rate=1.0):
    """Single-segment arrival realization with a constant rate."""
    return ArrivalRealization(
        bounds=np.array([0.0, float(horizon)]),
        rates=np.array([float(rate)]),
        horizon=float(horizon),
    )


@pytest.fixture
def instant_service():
    """Service that jumps straight to beta_max=2 when the light turns green."""
    return ServiceConfig(beta_max=2.0, ramp_rate=float("inf"), cycle_length=1.0)


FAST_CFG = """\
cycle_length = 1.0
light_cycles = 5
alpha_mean = 4.1
zeta = 0.3
off_max = 0.02
on_max = 0.063
beta_max = 5.0
ramp_rate = 62.0
set_point = 0.3
theta_min = 0.1
theta_max = 0.9
derivative_floor = 1e-3
theta_initial = 0.9
n_control_cycles = 12
seed = 12345
warm_start = true
"""


@pytest.fixture
def fast_cfg_file(tmp_path):
    """Small, quickly-converging experiment config on disk."""
    p = tmp_path / "fast.cfg"
    p.write_text(FAST_CFG)
    return str(p)
