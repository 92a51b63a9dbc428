"""Finite-difference ground truth for the sample-path derivative.

The derivative estimator is validated against central finite differences of
the performance measure computed on the identical arrival realization
(common random numbers) with the same initial buffer, so the difference
quotient converges to the sample derivative, not a noisy mean.  Grid points
where the small perturbation changes the event structure are flagged and
excluded from pass/fail judgements: there the sample function has a kink and
finite differences are locally meaningless.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ipa import ipa_derivative
from .rates import ArrivalRealization, ServiceConfig
from .simulate import SamplePath, performance, simulate_control_cycle

DEFAULT_H = 1e-6


@dataclass(frozen=True)
class FdReport:
    theta_grid: tuple
    L_values: tuple
    ipa_values: tuple
    fd_values: tuple
    abs_errors: tuple
    rel_errors: tuple
    flagged: tuple  # True where theta +/- h straddles an event-order change

    def worst_unflagged_rel_error(self) -> float:
        vals = [r for r, f in zip(self.rel_errors, self.flagged) if not f]
        return max(vals) if vals else 0.0


def _event_kinds(path: SamplePath) -> list[str]:
    return [ev.kind for ev in path.events]


def finite_difference(
    theta: float,
    h: float,
    arrival: ArrivalRealization,
    svc: ServiceConfig,
    N: int,
    x0: float = 0.0,
) -> float:
    """Central difference of the performance measure at theta, both sides
    evaluated on the same arrival realization and initial buffer."""
    if h <= 0.0:
        raise ValueError(f"h must be > 0, got {h}")
    if theta - h < 0.0 or theta + h > svc.cycle_length:
        raise ValueError(
            f"theta +/- h = {theta}+/-{h} leaves [0, {svc.cycle_length}]"
        )
    lo = performance(simulate_control_cycle(theta - h, arrival, svc, N, x0))
    hi = performance(simulate_control_cycle(theta + h, arrival, svc, N, x0))
    return (hi - lo) / (2.0 * h)


def straddles_event_change(
    theta: float,
    h: float,
    arrival: ArrivalRealization,
    svc: ServiceConfig,
    N: int,
    x0: float = 0.0,
) -> bool:
    """True when the perturbed paths at theta-h and theta+h disagree on the
    sequence of event kinds."""
    lo = simulate_control_cycle(theta - h, arrival, svc, N, x0)
    hi = simulate_control_cycle(theta + h, arrival, svc, N, x0)
    return _event_kinds(lo) != _event_kinds(hi)


def fd_report(
    theta_grid,
    arrival: ArrivalRealization,
    svc: ServiceConfig,
    N: int,
    h: float = DEFAULT_H,
) -> FdReport:
    """Estimator-versus-finite-difference comparison over a theta grid.

    Always uses a zero initial buffer so the performance measure is a pure
    function of theta for the fixed realization.
    """
    thetas, Ls, ipas, fds, abss, rels, flags = [], [], [], [], [], [], []
    for theta in theta_grid:
        theta = float(theta)
        path = simulate_control_cycle(theta, arrival, svc, N, 0.0)
        est = ipa_derivative(path).L_prime
        fd = finite_difference(theta, h, arrival, svc, N, 0.0)
        flag = straddles_event_change(theta, h, arrival, svc, N, 0.0)
        err = abs(est - fd)
        thetas.append(theta)
        Ls.append(performance(path))
        ipas.append(est)
        fds.append(fd)
        abss.append(err)
        rels.append(err / max(abs(fd), 1e-12))
        flags.append(flag)
    return FdReport(
        theta_grid=tuple(thetas),
        L_values=tuple(Ls),
        ipa_values=tuple(ipas),
        fd_values=tuple(fds),
        abs_errors=tuple(abss),
        rel_errors=tuple(rels),
        flagged=tuple(flags),
    )


def trace_plant_curve(
    arrival: ArrivalRealization,
    svc: ServiceConfig,
    N: int,
    theta_grid,
) -> list[tuple[float, float, float]]:
    """(theta, L, L') along a theta grid on the shared realization; a
    brute-force view of the plant function for monotonicity checks."""
    out = []
    for theta in theta_grid:
        theta = float(theta)
        path = simulate_control_cycle(theta, arrival, svc, N, 0.0)
        out.append((theta, performance(path), ipa_derivative(path).L_prime))
    return out
