"""Sample-path derivative of the congestion measure with respect to the red
fraction.

For a completed SamplePath the derivative of the buffer content at any time
inside a non-empty period is a sum of observable service rates: the left
limits of the service rate at every green-to-red switch since the period
started, plus the current service rate, minus the right limit at the period
start.  Integrating that expression segment-by-segment (all pieces are
affine) gives the derivative of the time-average exactly, with no numerical
quadrature and no re-simulation.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass

from .simulate import SamplePath

_TOL = 1e-12


@dataclass(frozen=True)
class NonEmptyPeriodRecord:
    """One maximal interval with positive buffer content."""

    u_start: float
    beta_after_start: float            # service rate just after the period starts
    green_to_red_betas: tuple          # ((switch time, service left-limit), ...)
    t_end: float


@dataclass(frozen=True)
class IpaResult:
    L_prime: float
    per_period_contributions: tuple
    x_prime_trace: tuple | None = None  # ((t, x_prime), ...) sampled for plotting
    boundary: bool = False              # theta at 0 or at the full cycle length


def extract_periods(path: SamplePath) -> list[NonEmptyPeriodRecord]:
    """All maximal x > 0 intervals, with the one-sided service limits the
    derivative formula needs, read off the event log."""
    periods = []
    u_start = None
    beta_after = 0.0
    switches: list[tuple[float, float]] = []
    for ev in path.events:
        if ev.kind == "BufferNonEmptyStart":
            u_start = ev.time
            beta_after = ev.beta_right
            switches = []
        elif ev.kind == "RedStart" and u_start is not None:
            if ev.time > u_start + _TOL:
                switches.append((ev.time, ev.beta_left))
        elif ev.kind in ("BufferEmpty", "Horizon") and u_start is not None:
            if ev.time > u_start + _TOL:
                kept = tuple(s for s in switches if s[0] < ev.time - _TOL)
                periods.append(
                    NonEmptyPeriodRecord(u_start, beta_after, kept, ev.time)
                )
            u_start = None
            if ev.kind == "Horizon":
                break
    return periods


def _segment_range(path: SamplePath, u: float, v: float):
    """Indices of path segments covering (u, v); boundaries align with events."""
    starts = [s.t_start for s in path.segments]
    i = bisect_right(starts, u + _TOL) - 1
    if i < 0:
        i = 0
    j = bisect_left(starts, v - _TOL)
    return range(i, j)


def x_prime_at(record: NonEmptyPeriodRecord, path: SamplePath, t: float) -> float:
    """Derivative of the buffer content with respect to the red fraction at a
    time t strictly inside the period, where the service rate is continuous."""
    if not record.u_start < t < record.t_end:
        raise ValueError(
            f"t={t} outside period ({record.u_start}, {record.t_end})"
        )
    for ev in path.events:
        if ev.kind in ("RedStart", "RampSaturation", "BufferEmpty") and \
                abs(ev.time - t) <= _TOL:
            raise ValueError(
                f"t={t} is a {ev.kind} event time; use one-sided limits"
            )
    total = 0.0
    for switch_time, beta_left in record.green_to_red_betas:
        if switch_time < t:
            total += beta_left
    total += path.segment_at(t).beta_at(t)
    total -= record.beta_after_start
    return total


def period_contribution(record: NonEmptyPeriodRecord, path: SamplePath) -> float:
    """Integral of the buffer-content derivative over one non-empty period."""
    u, v = record.u_start, record.t_end
    total = 0.0
    for switch_time, beta_left in record.green_to_red_betas:
        total += beta_left * (v - switch_time)
    for i in _segment_range(path, u, v):
        total += path.segments[i].integral_beta()
    total -= record.beta_after_start * (v - u)
    return total


def ipa_derivative(path: SamplePath, sample_trace: bool = False,
                   trace_points: int = 1000) -> IpaResult:
    """Derivative of the time-average buffer content with respect to the red
    fraction, computed from the sample path alone.

    The optional trace samples the buffer-content derivative on a uniform
    grid for plotting; the returned L_prime never uses it.
    """
    periods = extract_periods(path)
    contributions = tuple(period_contribution(rec, path) for rec in periods)
    L_prime = sum(contributions) / path.horizon

    trace = None
    if sample_trace:
        pts = []
        for i in range(trace_points):
            t = path.horizon * (i + 0.5) / trace_points
            val = 0.0
            for rec in periods:
                if rec.u_start < t < rec.t_end:
                    try:
                        val = x_prime_at(rec, path, t)
                    except ValueError:
                        val = float("nan")
                    break
            pts.append((t, val))
        trace = tuple(pts)

    return IpaResult(
        L_prime=L_prime,
        per_period_contributions=contributions,
        x_prime_trace=trace,
        boundary=_is_boundary(path),
    )


def _is_boundary(path: SamplePath) -> bool:
    if path.theta <= 0.0:
        return True
    # theta equals the cycle length iff no green ever starts
    return not any(ev.kind == "GreenStart" for ev in path.events)
