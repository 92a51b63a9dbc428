"""Sample paths of the intersection queue over one control cycle.

simulate_control_cycle integrates the one-sided buffer dynamics exactly: the
queue grows at the arrival rate minus the service rate while positive, and is
frozen at zero while the available service capacity covers the arrivals.  The
returned SamplePath carries both the piecewise-polynomial trajectory and a
typed event log; the event log is the single source of truth for one-sided
service-rate limits, which the derivative estimator needs.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

from . import kernel
from ._kernel_py import empty_hit as _empty_hit
from .rates import ArrivalRealization, ServiceConfig

#: event kind names, indexed by the kernel's integer codes
KIND_NAMES = (
    "RedStart",
    "GreenStart",
    "BufferEmpty",
    "BufferNonEmptyStart",
    "RampSaturation",
    "ArrivalChange",
    "Horizon",
)


@dataclass(frozen=True)
class PathEvent:
    time: float
    kind: str
    beta_left: float   # service rate just before the event
    beta_right: float  # service rate just after the event
    x_at: float        # buffer content at the event


@dataclass(frozen=True)
class PathSegment:
    """Maximal event-free interval.  On it the arrival rate is the constant
    alpha and the service rate is beta_start + beta_slope*(t - t_start), so
    x(t) = x_start + (alpha - beta_start)*(t - t_start)
         - beta_slope*(t - t_start)**2 / 2.
    """

    t_start: float
    t_end: float
    x_start: float
    alpha: float
    beta_start: float
    beta_slope: float

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    @property
    def x_end(self) -> float:
        return self.x_at(self.t_end)

    def x_at(self, t: float) -> float:
        dt = t - self.t_start
        return self.x_start + (self.alpha - self.beta_start) * dt \
            - 0.5 * self.beta_slope * dt * dt

    def beta_at(self, t: float) -> float:
        return self.beta_start + self.beta_slope * (t - self.t_start)

    def integral_x(self) -> float:
        """Exact integral of x over the segment."""
        dt = self.duration
        return (
            self.x_start * dt
            + 0.5 * (self.alpha - self.beta_start) * dt * dt
            - self.beta_slope * dt * dt * dt / 6.0
        )

    def integral_beta(self) -> float:
        """Exact integral of the service rate over the segment."""
        dt = self.duration
        return self.beta_start * dt + 0.5 * self.beta_slope * dt * dt


@dataclass(frozen=True)
class SamplePath:
    theta: float
    horizon: float
    segments: tuple  # of PathSegment, partitioning [0, horizon]
    events: tuple    # of PathEvent, ordered by time
    x_final: float

    def segment_at(self, t: float) -> PathSegment:
        """Segment containing t (the one starting at t for boundary points)."""
        if not 0.0 <= t <= self.horizon:
            raise ValueError(f"t={t} outside [0, {self.horizon}]")
        starts = [s.t_start for s in self.segments]
        i = bisect_right(starts, t) - 1
        if i < 0:
            i = 0
        return self.segments[i]

    def x_at(self, t: float) -> float:
        return self.segment_at(t).x_at(t)


def simulate_control_cycle(
    theta: float,
    arrival: ArrivalRealization,
    svc: ServiceConfig,
    N: int,
    x0: float = 0.0,
) -> SamplePath:
    """Exact event-driven simulation of N light cycles at red fraction theta."""
    C = svc.cycle_length
    if not 0.0 <= theta <= C:
        raise ValueError(f"theta={theta} outside [0, {C}]")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if arrival.horizon < N * C - kernel.EPS:
        raise ValueError(
            f"arrival horizon {arrival.horizon} shorter than N*C = {N * C}"
        )
    if not (math.isfinite(x0) and x0 >= 0.0):
        raise ValueError(f"x0 must be finite and >= 0, got {x0}")

    raw_segments, raw_events, x_final = kernel.integrate(
        theta, C, N, x0, svc.beta_max, svc.ramp_rate,
        arrival.bounds, arrival.rates,
    )
    segments = tuple(PathSegment(*s) for s in raw_segments)
    events = tuple(
        PathEvent(time, KIND_NAMES[code], bl, br, xa)
        for (time, code, bl, br, xa) in raw_events
    )
    return SamplePath(
        theta=theta,
        horizon=N * C,
        segments=segments,
        events=events,
        x_final=x_final,
    )


def performance(path: SamplePath) -> float:
    """Time-average buffer content over the control cycle (exact)."""
    total = 0.0
    for seg in path.segments:
        total += seg.integral_x()
    return total / path.horizon


def solve_empty_hit(segment: PathSegment) -> float | None:
    """Earliest time in (t_start, t_end] where the segment's quadratic hits
    zero, or None.  Uses the numerically stable root form."""
    c = segment.alpha - segment.beta_start
    tau_min = 0.0 if segment.x_start > 0.0 else kernel.EPS
    tau = _empty_hit(
        segment.x_start, c, segment.beta_slope, segment.duration, tau_min
    )
    if tau < 0.0:
        return None
    return segment.t_start + tau
