"""
SIS epidemic model tests.

Covers the degree law, Θ and the risk measures, RK4 integration,
and both steady-state solvers.
"""

import math

import numpy as np
import pytest

from resilgrid.core.epidemic.dto import (
    DegreeDistribution,
    EpidemicParams,
    EpidemicState,
    FleetParams,
)
from resilgrid.core.epidemic.model import (
    cyber_risk,
    default_time_step,
    epidemic_threshold,
    integrate,
    integrate_trajectory,
    scale_free_distribution,
    steady_state,
    steady_state_continuum,
    steady_state_densities,
    systemic_risk,
    theta,
)
from resilgrid.core.exceptions import InputValidationError, IntegrationInstabilityError


class TestScaleFreeDistribution:
    def test_single_point_support(self):
        dist = scale_free_distribution(3, 3)
        assert dist.probability(3) == 1.0

    def test_two_degrees(self):
        dist = scale_free_distribution(1, 2)
        assert dist.probability(1) == pytest.approx(8 / 9)
        assert dist.probability(2) == pytest.approx(1 / 9)

    def test_three_degrees(self):
        dist = scale_free_distribution(2, 4)
        assert dist.probability(2) == pytest.approx(0.7036, abs=1e-4)
        assert dist.probability(3) == pytest.approx(0.2085, abs=1e-4)
        assert dist.probability(4) == pytest.approx(0.0879, abs=1e-4)

    def test_moments(self):
        dist = scale_free_distribution(1, 2)
        assert dist.mean == pytest.approx(10 / 9)
        assert dist.second_moment == pytest.approx(12 / 9)
        assert dist.second_moment >= dist.mean ** 2

    def test_normalized(self, dist_100):
        assert dist_100.p.sum() == pytest.approx(1.0, abs=1e-12)
        assert dist_100.probability(0) == 0.0
        assert dist_100.probability(101) == 0.0

    def test_rejects_inverted_support(self):
        with pytest.raises(InputValidationError):
            scale_free_distribution(5, 4)

    def test_rejects_unnormalized(self):
        with pytest.raises(InputValidationError):
            DegreeDistribution(d_min=1, k_max=2, p=np.array([0.5, 0.4]))

    def test_threshold(self):
        dist = scale_free_distribution(1, 2)
        assert epidemic_threshold(dist) == pytest.approx(1.2)


class TestThetaAndRisk:
    def test_theta_bounds(self, dist_100):
        assert theta(EpidemicState.uniform(dist_100, 0.0), dist_100) == 0.0
        assert theta(EpidemicState.uniform(dist_100, 1.0), dist_100) == pytest.approx(1.0)

    def test_theta_hand_value(self):
        dist = scale_free_distribution(1, 2)
        state = EpidemicState(t=0.0, I=np.array([0.0, 0.9]))
        assert theta(state, dist) == pytest.approx(0.18)

    def test_cyber_risk_constant_field(self):
        dist = scale_free_distribution(1, 2)
        assert cyber_risk(EpidemicState(t=0.0, I=np.array([0.9, 0.9])), dist) == pytest.approx(0.9)

    def test_support_mismatch(self, dist_100):
        state = EpidemicState(t=0.0, I=np.zeros(3))
        with pytest.raises(InputValidationError):
            cyber_risk(state, dist_100)

    def test_state_rejects_out_of_box(self):
        with pytest.raises(InputValidationError):
            EpidemicState(t=0.0, I=np.array([0.5, 1.2]))

    def test_systemic_risk(self):
        fleet = FleetParams(n_devices=1e7, device_watts=5000.0, power_base=1e8)
        assert systemic_risk(0.0, fleet) == 0.0
        assert systemic_risk(1.0, fleet) == pytest.approx(500.0)
        assert systemic_risk(0.5, fleet) == pytest.approx(250.0)

    def test_params_reject_nonpositive(self):
        with pytest.raises(ValueError):
            EpidemicParams(gamma=0.0, zeta=0.5)


class TestIntegrate:
    def test_disease_free_stays_free(self, dist_100):
        params = EpidemicParams(gamma=0.2, zeta=0.5)
        out = integrate(EpidemicState.uniform(dist_100, 0.0), params, dist_100, 0.01, 500)
        assert np.all(out.I == 0.0)
        assert out.t == pytest.approx(5.0)

    def test_pure_recovery(self, dist_100):
        params = EpidemicParams(gamma=0.2, zeta=1e-14)
        out = integrate(EpidemicState.uniform(dist_100, 0.05), params, dist_100, 0.01, 1000)
        np.testing.assert_allclose(out.I, 0.05 * math.exp(-0.2 * 10.0), atol=1e-6)

    def test_converges_to_steady_state(self, dist_100):
        params = EpidemicParams(gamma=0.2, zeta=0.5)
        out = integrate(EpidemicState.uniform(dist_100, 0.05), params, dist_100, 0.01, 20000)
        _, I_bar = steady_state(params, dist_100)
        assert cyber_risk(out, dist_100) == pytest.approx(I_bar, abs=1e-4)

    def test_stays_in_box(self, dist_100):
        params = EpidemicParams(gamma=0.2, zeta=0.5)
        dt = default_time_step(params, dist_100)
        out = integrate(EpidemicState.uniform(dist_100, 0.99), params, dist_100, dt, 200)
        assert np.all((out.I >= 0.0) & (out.I <= 1.0))

    def test_unstable_step_raises(self, dist_100):
        params = EpidemicParams(gamma=0.2, zeta=5.0)
        with pytest.raises(IntegrationInstabilityError):
            integrate(EpidemicState.uniform(dist_100, 0.5), params, dist_100, 1.0, 5)

    def test_trajectory_sampling(self, dist_100):
        params = EpidemicParams(gamma=0.2, zeta=0.3)
        times, risks, final = integrate_trajectory(
            EpidemicState.uniform(dist_100, 0.05), params, dist_100, 0.01, 1000, record_every=10
        )
        assert times.shape == risks.shape == (101,)
        assert times[0] == 0.0 and times[-1] == pytest.approx(10.0)
        assert risks[0] == pytest.approx(0.05)
        assert risks[-1] == pytest.approx(cyber_risk(final, dist_100))

    def test_rejects_nonpositive_dt(self, dist_100):
        params = EpidemicParams(gamma=0.2, zeta=0.3)
        with pytest.raises(InputValidationError):
            integrate(EpidemicState.uniform(dist_100, 0.05), params, dist_100, 0.0, 1)


class TestSteadyState:
    def test_zero_at_threshold(self, dist_100):
        gamma = 0.2
        params = EpidemicParams(gamma=gamma, zeta=gamma / epidemic_threshold(dist_100))
        assert steady_state(params, dist_100) == pytest.approx((0.0, 0.0), abs=1e-9)

    def test_zero_above_threshold(self, dist_100):
        params = EpidemicParams(gamma=10.0, zeta=0.1)
        assert steady_state(params, dist_100) == (0.0, 0.0)

    def test_matches_long_integration(self):
        dist = scale_free_distribution(1, 2)
        params = EpidemicParams(gamma=0.1, zeta=10.0)
        out = integrate(EpidemicState.uniform(dist, 0.05), params, dist, 0.01, 5000)
        _, I_bar = steady_state(params, dist)
        assert cyber_risk(out, dist) == pytest.approx(I_bar, abs=1e-3)

    def test_nondecreasing_in_zeta(self, dist_100):
        levels = [steady_state(EpidemicParams(gamma=0.2, zeta=z), dist_100)[1]
                  for z in np.linspace(0.02, 5.0, 40)]
        assert np.all(np.diff(levels) >= -1e-12)
        assert levels[-1] > 0.9

    def test_stationary_under_integration(self, dist_100):
        params = EpidemicParams(gamma=0.2, zeta=0.4)
        theta_bar, _ = steady_state(params, dist_100)
        I_eq = steady_state_densities(params, dist_100, theta_bar)
        dt = 0.01
        out = integrate(EpidemicState(t=0.0, I=I_eq), params, dist_100, dt, 1)
        assert np.max(np.abs(out.I - I_eq)) <= dt * 1e-8


class TestContinuum:
    def test_equal_rates(self):
        _, I_bar = steady_state_continuum(EpidemicParams(gamma=0.5, zeta=0.5), 1)
        assert I_bar == pytest.approx(math.exp(-1.0))

    def test_case_rates(self):
        theta_bar, I_bar = steady_state_continuum(EpidemicParams(gamma=0.2, zeta=0.5), 1)
        assert I_bar == pytest.approx(0.6703, abs=1e-4)
        assert 0.0 < theta_bar < 1.0

    @pytest.mark.parametrize("zeta", [0.2, 0.25, 0.3, 0.4, 0.5])
    def test_close_to_discrete(self, zeta):
        dist = scale_free_distribution(1, 1000)
        params = EpidemicParams(gamma=0.2, zeta=zeta)
        _, discrete = steady_state(params, dist)
        _, continuum = steady_state_continuum(params, 1)
        assert abs(continuum - discrete) <= 0.1


def _fixed_point_gap(params, dist, th):
    """Θ-map F(Θ) - Θ, with F(Θ) = Σ k p(k) ζkΘ/(γ+ζkΘ) / <k>."""
    zk = params.zeta * dist.degrees
    return np.array([
        np.dot(dist.degrees * dist.p, zk * t / (params.gamma + zk * t)) / dist.mean - t
        for t in th
    ])


class TestThresholdProperty:
    def test_randomized_instances(self):
        rng = np.random.default_rng(2024)
        th = np.concatenate([np.geomspace(1e-9, 1e-3, 200), np.linspace(1e-3, 1.0, 2001)[1:]])
        below = above = 0
        for _ in range(200):
            d_min = int(rng.integers(1, 4))
            dist = scale_free_distribution(d_min, int(rng.integers(d_min + 1, 201)))
            gamma = float(rng.uniform(0.05, 1.0))
            # γ/ζ spread over [thr/5, 5·thr], keeping 2% clear of the threshold
            factor = math.exp(rng.uniform(math.log(0.2), math.log(5.0)))
            if abs(factor - 1.0) < 0.02:
                factor = 1.02 if factor >= 1.0 else 0.98
            zeta = gamma / (factor * epidemic_threshold(dist))
            params = EpidemicParams(gamma=gamma, zeta=zeta)
            theta_bar, I_bar = steady_state(params, dist)
            gap = _fixed_point_gap(params, dist, th)
            if factor >= 1.0:
                above += 1
                assert (theta_bar, I_bar) == (0.0, 0.0)
                assert np.all(gap < 0.0)
            else:
                below += 1
                assert 0.0 < theta_bar <= 1.0
                assert I_bar > 0.0
                crossings = np.count_nonzero(np.diff(np.sign(gap)) != 0)
                assert crossings == 1
                assert _fixed_point_gap(params, dist, [theta_bar])[0] == pytest.approx(0.0, abs=1e-9)
        assert below > 50 and above > 50


@pytest.mark.slow
class TestOdeLimit:
    @pytest.mark.parametrize("zeta", [0.2, 0.25, 0.3, 0.4, 0.5])
    def test_matches_fixed_point(self, dist_100, zeta):
        params = EpidemicParams(gamma=0.2, zeta=zeta)
        out = integrate(EpidemicState.uniform(dist_100, 0.05), params, dist_100, 0.01, 40000)
        _, I_bar = steady_state(params, dist_100)
        assert I_bar > 0.0
        assert cyber_risk(out, dist_100) == pytest.approx(I_bar, abs=1e-3)
