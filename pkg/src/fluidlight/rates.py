"""Arrival and service rate models for a signalized fluid-queue intersection.

The arrival process is an off/on process: the road alternates between off
periods (rate 0) and on periods with a rate drawn uniformly around a mean.
The service process is a red/green cycle of fixed length: zero service during
red, a linear ramp capped at a maximum during green, and full-rate service
during green once the queue has drained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ArrivalConfig:
    """Off/on arrival process parameters.

    Off durations ~ U[0, off_max], on durations ~ U[0, on_max]; the rate of
    each on period is drawn from U[(1-spread)*mean, (1+spread)*mean] and held
    constant for that period.
    """

    mean_rate: float
    relative_spread: float = 0.0
    off_max: float = 0.0
    on_max: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mean_rate) and self.mean_rate > 0.0):
            raise ValueError(f"mean_rate must be finite and > 0, got {self.mean_rate}")
        if not (math.isfinite(self.relative_spread) and 0.0 <= self.relative_spread < 1.0):
            raise ValueError(
                f"relative_spread must lie in [0, 1), got {self.relative_spread}"
            )
        if not (math.isfinite(self.off_max) and self.off_max >= 0.0):
            raise ValueError(f"off_max must be finite and >= 0, got {self.off_max}")
        if not (math.isfinite(self.on_max) and self.on_max > 0.0):
            raise ValueError(f"on_max must be finite and > 0, got {self.on_max}")


@dataclass(frozen=True)
class ServiceConfig:
    """Service-rate model: a ramp of slope ramp_rate capped at beta_max.

    ramp_rate may be math.inf, meaning the rate jumps straight to beta_max
    when the light turns green.  cycle_length is the full red+green period.
    """

    beta_max: float
    ramp_rate: float
    cycle_length: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.beta_max) and self.beta_max > 0.0):
            raise ValueError(f"beta_max must be finite and > 0, got {self.beta_max}")
        if math.isnan(self.ramp_rate) or self.ramp_rate < 0.0:
            raise ValueError(f"ramp_rate must be >= 0 (inf allowed), got {self.ramp_rate}")
        if not (math.isfinite(self.cycle_length) and self.cycle_length > 0.0):
            raise ValueError(
                f"cycle_length must be finite and > 0, got {self.cycle_length}"
            )


@dataclass(frozen=True, eq=False)
class ArrivalRealization:
    """One realization of the arrival-rate trajectory as piecewise-constant
    segments.  bounds has one more entry than rates; segment i covers
    [bounds[i], bounds[i+1]) at rate rates[i].  Zero-length segments are
    never stored.
    """

    bounds: np.ndarray
    rates: np.ndarray
    horizon: float

    @property
    def segments(self):
        return [
            (float(self.bounds[i]), float(self.bounds[i + 1]), float(self.rates[i]))
            for i in range(len(self.rates))
        ]

    def same_as(self, other: "ArrivalRealization") -> bool:
        return (
            self.horizon == other.horizon
            and np.array_equal(self.bounds, other.bounds)
            and np.array_equal(self.rates, other.rates)
        )


def generate_arrival(cfg: ArrivalConfig, horizon: float, seed: int) -> ArrivalRealization:
    """Draw an off/on arrival realization covering [0, horizon].

    Generation alternates off, on, off, on, ... starting with an off period,
    truncating the final period at the horizon.  The draw is a pure function
    of (cfg, horizon, seed): identical inputs give bit-identical output.
    """
    if not (math.isfinite(horizon) and horizon > 0.0):
        raise ValueError(f"horizon must be finite and > 0, got {horizon}")

    rng = np.random.default_rng(seed)
    lo = (1.0 - cfg.relative_spread) * cfg.mean_rate
    hi = (1.0 + cfg.relative_spread) * cfg.mean_rate
    mean_pair = 0.5 * cfg.off_max + 0.5 * cfg.on_max
    batch = max(16, int(1.5 * horizon / mean_pair) + 1)

    bounds = [0.0]
    rates: list[float] = []
    total = 0.0
    guard = 0
    while total < horizon:
        guard += 1
        if guard > 1000:
            raise RuntimeError("arrival generation failed to reach the horizon")
        offs = rng.uniform(0.0, cfg.off_max, batch)
        ons = rng.uniform(0.0, cfg.on_max, batch)
        levels = rng.uniform(lo, hi, batch)
        for i in range(batch):
            for dur, rate in ((float(offs[i]), 0.0), (float(ons[i]), float(levels[i]))):
                if dur <= 0.0:
                    continue
                t1 = min(total + dur, horizon)
                if t1 <= total:
                    continue
                bounds.append(t1)
                rates.append(rate)
                total = t1
                if total >= horizon:
                    break
            if total >= horizon:
                break

    return ArrivalRealization(
        bounds=np.asarray(bounds, dtype=np.float64),
        rates=np.asarray(rates, dtype=np.float64),
        horizon=float(horizon),
    )


def arrival_rate_at(real: ArrivalRealization, t: float) -> float:
    """Arrival rate at time t, using the right-limit at segment boundaries.

    t == horizon returns the last segment's rate.
    """
    if not 0.0 <= t <= real.horizon:
        raise ValueError(f"t={t} outside [0, {real.horizon}]")
    i = int(np.searchsorted(real.bounds, t, side="right")) - 1
    last = len(real.rates) - 1
    if i > last:
        i = last
    if i < 0:
        i = 0
    return float(real.rates[i])


def service_rate(svc: ServiceConfig, theta: float, t: float, buffer_positive: bool) -> float:
    """Memoryless service rate at time t for red fraction theta.

    Zero during red; during green, the ramp capped at beta_max while the
    buffer is positive, and beta_max once it is empty.  The event-driven
    simulator additionally latches the post-empty rate at beta_max for the
    remainder of the green period; that latch is simulator state and is not
    represented here.
    """
    C = svc.cycle_length
    if not 0.0 <= theta <= C:
        raise ValueError(f"theta={theta} outside [0, {C}]")
    if t < 0.0 or not math.isfinite(t):
        raise ValueError(f"t must be finite and >= 0, got {t}")
    k = math.floor(t / C)
    tau = t - k * C
    if tau < theta:
        return 0.0
    if not buffer_positive:
        return svc.beta_max
    if math.isinf(svc.ramp_rate):
        return svc.beta_max
    return min(svc.ramp_rate * (tau - theta), svc.beta_max)
