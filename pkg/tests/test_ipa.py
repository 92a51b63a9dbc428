import random

import pytest

from fluidlight.ipa import (
    extract_periods,
    ipa_derivative,
    period_contribution,
    x_prime_at,
)
from fluidlight.rates import ArrivalConfig, ServiceConfig, generate_arrival
from fluidlight.simulate import simulate_control_cycle
from tests.conftest import constant_arrival


@pytest.fixture
def triangle_path(instant_service):
    return simulate_control_cycle(0.5, constant_arrival(1.0), instant_service, 1)


@pytest.fixture
def empty_path(instant_service):
    return simulate_control_cycle(0.0, constant_arrival(1.0), instant_service, 1)


@pytest.fixture
def two_cycle_path(instant_service):
    return simulate_control_cycle(0.75, constant_arrival(2.0), instant_service, 2)


class TestExtractPeriods:
    def test_empty_path(self, empty_path):
        assert extract_periods(empty_path) == []

    def test_triangle(self, triangle_path):
        recs = extract_periods(triangle_path)
        assert len(recs) == 1
        rec = recs[0]
        assert rec.u_start == 0.0
        assert rec.beta_after_start == 0.0  # period starts in red
        assert rec.green_to_red_betas == ()
        assert rec.t_end == 1.0

    def test_two_cycles(self, two_cycle_path):
        recs = extract_periods(two_cycle_path)
        assert len(recs) == 1
        rec = recs[0]
        assert rec.u_start == 0.0
        assert rec.beta_after_start == 0.0
        # the light switched back to red at t=1 while draining at full rate
        assert rec.green_to_red_betas == ((1.0, 2.0),)
        assert rec.t_end == 2.0


class TestXPrimeAt:
    def test_triangle_red(self, triangle_path):
        rec = extract_periods(triangle_path)[0]
        assert x_prime_at(rec, triangle_path, 0.25) == 0.0

    def test_triangle_green(self, triangle_path):
        rec = extract_periods(triangle_path)[0]
        assert x_prime_at(rec, triangle_path, 0.75) == 2.0

    def test_second_red(self, two_cycle_path):
        rec = extract_periods(two_cycle_path)[0]
        assert x_prime_at(rec, two_cycle_path, 1.5) == 2.0

    def test_second_green(self, two_cycle_path):
        rec = extract_periods(two_cycle_path)[0]
        assert x_prime_at(rec, two_cycle_path, 1.9) == 4.0

    def test_outside_period(self, triangle_path):
        rec = extract_periods(triangle_path)[0]
        with pytest.raises(ValueError, match="outside"):
            x_prime_at(rec, triangle_path, 1.5)

    def test_at_discontinuity(self, two_cycle_path):
        rec = extract_periods(two_cycle_path)[0]
        with pytest.raises(ValueError, match="one-sided"):
            x_prime_at(rec, two_cycle_path, 1.0)  # RedStart instant


class TestIpaDerivative:
    def test_empty_path(self, empty_path):
        res = ipa_derivative(empty_path)
        assert res.L_prime == 0.0
        assert res.per_period_contributions == ()

    def test_triangle(self, triangle_path):
        # L(theta) = theta**2 for this scenario, so L'(0.5) = 1
        assert ipa_derivative(triangle_path).L_prime == pytest.approx(
            1.0, abs=1e-15
        )

    def test_two_cycles(self, two_cycle_path):
        # x' is 0 until the first green, then 2, 2, 4 on the remaining spans
        assert ipa_derivative(two_cycle_path).L_prime == pytest.approx(
            1.5, abs=1e-15
        )

    def test_boundary_flag(self, empty_path, triangle_path, instant_service):
        assert ipa_derivative(empty_path).boundary
        assert not ipa_derivative(triangle_path).boundary
        all_red = simulate_control_cycle(
            1.0, constant_arrival(1.0), instant_service, 1
        )
        assert ipa_derivative(all_red).boundary

    def test_trace_sampling(self, triangle_path):
        res = ipa_derivative(triangle_path, sample_trace=True, trace_points=100)
        assert len(res.x_prime_trace) == 100
        # trace is for plotting only; values inside red are 0, green are 2
        t, v = res.x_prime_trace[10]
        assert v == 0.0
        t, v = res.x_prime_trace[90]
        assert v == 2.0


class TestProperties:
    def test_red_start_contributions_nonnegative(self):
        # when a period starts in red every term of the derivative is >= 0
        rng = random.Random(9)
        acfg = ArrivalConfig(4.1, 0.3, 0.02, 0.063)
        for _ in range(20):
            svc = ServiceConfig(5.0, rng.choice([0.62, 62.0, float("inf")]), 1.0)
            arr = generate_arrival(acfg, 5.0, rng.getrandbits(32))
            path = simulate_control_cycle(rng.uniform(0.1, 0.9), arr, svc, 5)
            for rec in extract_periods(path):
                if rec.beta_after_start == 0.0:
                    assert period_contribution(rec, path) >= -1e-12

    def test_contributions_sum_to_l_prime(self):
        acfg = ArrivalConfig(4.1, 0.3, 0.02, 0.063)
        svc = ServiceConfig(5.0, 62.0, 1.0)
        arr = generate_arrival(acfg, 5.0, 31337)
        path = simulate_control_cycle(0.4, arr, svc, 5)
        res = ipa_derivative(path)
        assert res.L_prime == pytest.approx(
            sum(res.per_period_contributions) / path.horizon, abs=1e-15
        )
