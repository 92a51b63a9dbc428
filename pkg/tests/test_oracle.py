import numpy as np
import pytest

from fluidlight.oracle import (
    fd_report,
    finite_difference,
    straddles_event_change,
    trace_plant_curve,
)
from fluidlight.rates import ArrivalConfig, ServiceConfig, generate_arrival
from fluidlight.simulate import performance, simulate_control_cycle
from tests.conftest import constant_arrival


class TestFiniteDifference:
    def test_triangle(self, instant_service):
        fd = finite_difference(0.5, 1e-6, constant_arrival(1.0),
                               instant_service, 1)
        assert fd == pytest.approx(1.0, abs=1e-4)

    def test_always_empty_regime(self, instant_service):
        # arrival rate far below capacity: the queue clears almost instantly
        # and L is locally flat in theta
        fd = finite_difference(0.05, 1e-6, constant_arrival(1.0, rate=0.01),
                               instant_service, 1)
        assert abs(fd) <= 0.02

    def test_two_cycles(self, instant_service):
        fd = finite_difference(0.75, 1e-6, constant_arrival(2.0),
                               instant_service, 2)
        assert fd == pytest.approx(1.5, abs=1e-4)

    def test_boundary_rejected(self, instant_service):
        with pytest.raises(ValueError):
            finite_difference(0.0, 1e-6, constant_arrival(1.0),
                              instant_service, 1)
        with pytest.raises(ValueError):
            finite_difference(0.5, 0.0, constant_arrival(1.0),
                              instant_service, 1)


class TestStraddleDetection:
    def test_flags_event_structure_change(self, instant_service):
        # at theta = 0.5 the triangle empties exactly at the horizon; the
        # +h path keeps a residual queue (no BufferEmpty), so the two
        # perturbed event sequences differ
        assert straddles_event_change(0.5, 1e-6, constant_arrival(1.0),
                                      instant_service, 1)

    def test_quiet_in_smooth_region(self, instant_service):
        assert not straddles_event_change(0.3, 1e-6, constant_arrival(1.0),
                                          instant_service, 1)


class TestFdReport:
    def test_structure_and_agreement(self):
        acfg = ArrivalConfig(4.1, 0.3, 0.02, 0.063)
        svc = ServiceConfig(5.0, 0.62, 1.0)
        arr = generate_arrival(acfg, 10.0, 424242)
        grid = np.linspace(0.2, 0.8, 7)
        rep = fd_report(grid, arr, svc, 10)
        n = len(rep.theta_grid)
        assert n == 7
        for field in (rep.L_values, rep.ipa_values, rep.fd_values,
                      rep.abs_errors, rep.rel_errors, rep.flagged):
            assert len(field) == n
        for i in range(n):
            assert rep.abs_errors[i] == abs(rep.ipa_values[i] - rep.fd_values[i])
            denom = max(abs(rep.fd_values[i]), 1e-12)
            assert rep.rel_errors[i] == rep.abs_errors[i] / denom
        assert rep.worst_unflagged_rel_error() <= 0.01

    def test_worst_unflagged_skips_flagged(self):
        from fluidlight.oracle import FdReport
        rep = FdReport(
            theta_grid=(0.1, 0.2), L_values=(0.0, 0.0),
            ipa_values=(1.0, 1.0), fd_values=(1.0, 2.0),
            abs_errors=(0.0, 1.0), rel_errors=(0.0, 0.5),
            flagged=(False, True),
        )
        assert rep.worst_unflagged_rel_error() == 0.0


class TestTracePlantCurve:
    def test_triangle_analytic(self, instant_service):
        # L(theta) = theta**2 while the queue drains before the horizon
        # (theta <= 0.5); beyond that the residual queue flattens the curve
        curve = trace_plant_curve(constant_arrival(1.0), instant_service, 1,
                                  [0.25, 0.5, 0.75])
        assert curve[0][1] == pytest.approx(0.0625, abs=1e-15)
        assert curve[1][1] == pytest.approx(0.25, abs=1e-15)
        assert curve[2][1] == pytest.approx(0.4375, abs=1e-15)
        assert curve[0][2] == pytest.approx(0.5, abs=1e-15)   # 2*theta
        assert curve[2][2] == pytest.approx(0.5, abs=1e-15)   # 2 - 2*theta

    def test_singleton_matches_performance(self, instant_service):
        arr = constant_arrival(1.0)
        curve = trace_plant_curve(arr, instant_service, 1, [0.4])
        path = simulate_control_cycle(0.4, arr, instant_service, 1)
        assert curve == [(0.4, performance(path), curve[0][2])]

    def test_congestion_monotone_in_red_fraction(self):
        acfg = ArrivalConfig(4.1, 0.3, 0.02, 0.063)
        svc = ServiceConfig(5.0, 0.62, 1.0)
        arr = generate_arrival(acfg, 20.0, 12345)
        curve = trace_plant_curve(arr, svc, 20, np.linspace(0.1, 0.9, 17))
        Ls = [c[1] for c in curve]
        assert all(b >= a - 1e-12 for a, b in zip(Ls, Ls[1:]))
