"""Adaptive-gain integral controller for set-point tracking.

The update is Newton-like: the new input is the old input plus the tracking
error scaled by the reciprocal of the measured plant derivative.  Guards keep
the input inside configured bounds and keep the gain finite when the
derivative estimate is tiny or noisy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .seeding import mix64


@dataclass(frozen=True)
class ControllerConfig:
    set_point: float
    theta_min: float
    theta_max: float
    derivative_floor: float = 1e-3
    #: None, a constant relative error, or a per-step sequence; the signed
    #: relative error e_n perturbs the derivative to d*(1 + e_n) before
    #: inversion (robustness experiments).
    gain_error: float | Sequence[float] | None = None

    def __post_init__(self):
        if not (math.isfinite(self.set_point) and self.set_point > 0.0):
            raise ValueError(f"set_point must be finite and > 0, got {self.set_point}")
        if not self.theta_min < self.theta_max:
            raise ValueError(
                f"need theta_min < theta_max, got [{self.theta_min}, {self.theta_max}]"
            )
        if self.theta_min < 0.0:
            raise ValueError(f"theta_min must be >= 0, got {self.theta_min}")
        if not (math.isfinite(self.derivative_floor) and self.derivative_floor > 0.0):
            raise ValueError(
                f"derivative_floor must be finite and > 0, got {self.derivative_floor}"
            )

    def gain_error_at(self, n: int) -> float:
        if self.gain_error is None:
            return 0.0
        if isinstance(self.gain_error, (int, float)):
            return float(self.gain_error)
        return float(self.gain_error[(n - 1) % len(self.gain_error)])


@dataclass
class ControllerState:
    u_prev: float
    e_prev: float = 0.0
    n: int = 1
    history: list = field(default_factory=list)  # (n, u_n, y_n, e_n, A_n)


@dataclass(frozen=True)
class CycleObservation:
    """Per-control-cycle record of the closed loop."""

    n: int
    theta: float
    L: float
    L_prime: float
    gain: float
    error: float


def gain(g_prime: float, cfg: ControllerConfig, n: int = 1) -> float:
    """Reciprocal of the (possibly perturbed) plant derivative, floored.

    The denominator magnitude is floored at derivative_floor with its sign
    preserved (sign(0) taken as +1), so the gain stays finite for degenerate
    derivative estimates.
    """
    if not math.isfinite(g_prime):
        raise ValueError(f"g_prime must be finite, got {g_prime}")
    d = g_prime * (1.0 + cfg.gain_error_at(n))
    sign = -1.0 if d < 0.0 else 1.0
    mag = abs(d)
    if mag < cfg.derivative_floor:
        mag = cfg.derivative_floor
    return 1.0 / (sign * mag)


def step(state: ControllerState, y_n: float, g_prime: float,
         cfg: ControllerConfig) -> float:
    """Advance the loop one control cycle.

    y_n and g_prime are the output and derivative measured over the cycle
    just completed at state.u_prev.  Computes the error against the set
    point, applies the adaptive-gain integral update, clamps to the guard
    bounds, records history, and returns the next input.
    """
    if not (math.isfinite(y_n) and math.isfinite(g_prime)):
        raise ValueError(f"non-finite measurement: y={y_n}, g_prime={g_prime}")
    e = cfg.set_point - y_n
    A = gain(g_prime, cfg, state.n)
    u = state.u_prev + A * e
    if u < cfg.theta_min:
        u = cfg.theta_min
    elif u > cfg.theta_max:
        u = cfg.theta_max
    state.history.append((state.n, u, y_n, e, A))
    state.u_prev = u
    state.e_prev = e
    state.n += 1
    return u


class ScriptedPlant:
    """Deterministic, time-invariant plant for controller tests: an explicit
    output function and its derivative."""

    def __init__(self, g: Callable[[float], float],
                 g_prime: Callable[[float], float]):
        self._g = g
        self._g_prime = g_prime

    def observe(self, u: float, cycle_seed: int) -> tuple[float, float]:
        return self._g(u), self._g_prime(u)


class SimulationPlant:
    """The traffic intersection as a memoryless, time-varying plant.

    Each observation draws a fresh arrival realization from the given cycle
    seed, simulates one control cycle at the requested red fraction, and
    returns the time-average buffer content together with its sample-path
    derivative.  With warm_start the buffer carries over between cycles;
    otherwise every cycle starts empty.
    """

    def __init__(self, arrival_cfg, svc_cfg, light_cycles: int,
                 warm_start: bool = True):
        from .rates import generate_arrival  # local import avoids cycle at module load
        self._generate = generate_arrival
        self.arrival_cfg = arrival_cfg
        self.svc_cfg = svc_cfg
        self.light_cycles = light_cycles
        self.warm_start = warm_start
        self.x0 = 0.0
        self.last_path = None

    def reset(self):
        self.x0 = 0.0
        self.last_path = None

    def observe(self, theta: float, cycle_seed: int) -> tuple[float, float]:
        from .ipa import ipa_derivative
        from .simulate import performance, simulate_control_cycle

        horizon = self.light_cycles * self.svc_cfg.cycle_length
        arrival = self._generate(self.arrival_cfg, horizon, cycle_seed)
        path = simulate_control_cycle(
            theta, arrival, self.svc_cfg, self.light_cycles, self.x0
        )
        self.last_path = path
        if self.warm_start:
            self.x0 = path.x_final
        y = performance(path)
        g_prime = ipa_derivative(path).L_prime
        return y, g_prime


def run_regulation(plant, ctrl_cfg: ControllerConfig, n_cycles: int,
                   theta_initial: float, seed: int) -> list[CycleObservation]:
    """Closed-loop regulation for n_cycles control cycles.

    Cycle n is simulated at the current input (cycle 1 runs open-loop at
    theta_initial), measured, and the controller then sets the next input.
    Per-cycle randomness comes from mix64(seed, n), so any cycle can be
    re-simulated in isolation.
    """
    if n_cycles < 1:
        raise ValueError(f"n_cycles must be >= 1, got {n_cycles}")
    if not ctrl_cfg.theta_min <= theta_initial <= ctrl_cfg.theta_max:
        raise ValueError(
            f"theta_initial={theta_initial} outside "
            f"[{ctrl_cfg.theta_min}, {ctrl_cfg.theta_max}]"
        )
    state = ControllerState(u_prev=theta_initial)
    observations = []
    for n in range(1, n_cycles + 1):
        theta_n = state.u_prev
        y, g_prime = plant.observe(theta_n, mix64(seed, n))
        A = gain(g_prime, ctrl_cfg, n)
        e = ctrl_cfg.set_point - y
        observations.append(
            CycleObservation(n=n, theta=theta_n, L=y, L_prime=g_prime,
                             gain=A, error=e)
        )
        step(state, y, g_prime, ctrl_cfg)
    return observations
