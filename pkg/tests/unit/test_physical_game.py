"""
Min-max grid game tests.

Riccati gates, the uncapped sweep, the attacker's barrier root,
barrier Newton solves and the continuation in μ.
"""

import math

import numpy as np
import pytest

from resilgrid.core.exceptions import InputValidationError
from resilgrid.core.grid.discrete import operating_point, simulate
from resilgrid.core.physical_game.dto import GameWeights, case_study_weights
from resilgrid.core.physical_game.riccati import (
    riccati_attacker,
    riccati_check,
    riccati_defender,
)
from resilgrid.core.physical_game.solver import (
    attacker_root,
    costates,
    feasible_start,
    objective,
    pmp_residual,
    refine,
    solve_barrier,
    solve_unconstrained,
)


def _lqr_inputs(A, B, Q, Q_f, R, T, z0):
    S = Q_f
    gains = []
    for _ in range(T):
        K = np.linalg.solve(R + B.T @ S @ B, B.T @ S @ A)
        gains.append(K)
        S = Q + A.T @ S @ (A - B @ K)
    gains.reverse()
    z, out = z0.copy(), []
    for K in gains:
        u = -K @ z
        out.append(u)
        z = A @ z + B @ u
    return np.column_stack(out)


class TestGameWeights:
    def test_rejects_indefinite_q(self):
        with pytest.raises(InputValidationError):
            GameWeights(Q=-np.eye(3), Q_f=np.eye(3), R_d=[1.0], R_a=[1.0],
                        attack_index=[0], load_caps=[1.0])

    def test_rejects_alpha_not_above_one(self):
        with pytest.raises(InputValidationError):
            GameWeights(Q=np.eye(3), Q_f=np.eye(3), R_d=[1.0], R_a=[1.0],
                        attack_index=[0], load_caps=[1.0], alpha=1.0)

    def test_rejects_negative_caps(self):
        with pytest.raises(InputValidationError):
            GameWeights(Q=np.eye(3), Q_f=np.eye(3), R_d=[1.0], R_a=[1.0],
                        attack_index=[0], load_caps=[-1.0])

    def test_expand_and_restrict(self, ieee39_weights):
        Pa_v = np.arange(16.0).reshape(8, 2)
        full = ieee39_weights.expand(Pa_v, 29)
        assert full.shape == (29, 2)
        np.testing.assert_array_equal(ieee39_weights.restrict(full), Pa_v)

    def test_restrict_rejects_attack_off_the_surface(self, ieee39_weights):
        Pa = np.zeros((29, 1))
        Pa[0, 0] = 1.0
        with pytest.raises(InputValidationError):
            ieee39_weights.restrict(Pa)

    def test_case_study_weights(self, ieee39):
        w = case_study_weights(ieee39, ieee39.load_caps(166.4))
        assert w.Q.shape == (49, 49)
        np.testing.assert_allclose(np.diag(w.Q)[-10:], 5.0)
        np.testing.assert_allclose(w.Q_f, 5.0 * w.Q)
        np.testing.assert_allclose(w.load_caps, 20.8)
        assert (w.horizon, w.mu, w.alpha, w.n_max) == (20, 2.0, 5.0, 6)
        np.testing.assert_allclose(w.R_a, 0.05)
        assert w.cost_reference == "origin"
        assert (w.barrier_tol, w.barrier_max_iter) == (1e-8, 200)


class TestRiccati:
    def test_scalar_defender(self):
        ok, S, _ = riccati_defender(1.0, 1.0, 1.0, 1.0, 1.0, 1)
        assert ok
        assert S[0, 0, 0] == pytest.approx(1.5)

    def test_scalar_attacker_passes(self):
        ok, S, _ = riccati_attacker(1.0, 1.0, 1.0, 1.0, 2.0, 1)
        assert ok
        assert S[0, 0, 0] == pytest.approx(3.0)

    def test_scalar_attacker_fails(self):
        ok, _, worst = riccati_attacker(1.0, 1.0, 1.0, 1.0, 0.5, 1)
        assert not ok
        assert worst == pytest.approx(-0.5)

    def test_toy_certified(self, toy_grid, toy_weights):
        report = riccati_check(toy_grid, toy_weights)
        assert report.certified
        assert report.S_d.shape == (11, 3, 3)

    def test_weak_attack_cost_fails(self, toy_grid, toy_weights):
        import dataclasses

        weak = dataclasses.replace(toy_weights, R_a=np.array([1e-6]))
        assert not riccati_check(toy_grid, weak).attacker_ok

    def test_ieee39_case_weights_certified(self, ieee39, ieee39_grid):
        weights = case_study_weights(ieee39, ieee39.load_caps(166.4), r_a=0.05)
        np.testing.assert_allclose(weights.R_a, 0.05)
        report = riccati_check(ieee39_grid, weights)
        assert report.defender_ok is True
        assert report.attacker_ok is True
        assert report.certified

    def test_ieee39_attacker_gate_needs_enough_cost(self, ieee39, ieee39_grid):
        weights = case_study_weights(ieee39, ieee39.load_caps(166.4), r_a=1e-5)
        report = riccati_check(ieee39_grid, weights)
        assert report.defender_ok
        assert not report.attacker_ok

    def test_ieee39_attacker_gate_tightens_with_frequency_weight(self, ieee39, ieee39_grid):
        caps = ieee39.load_caps(166.4)
        light = riccati_check(ieee39_grid, case_study_weights(ieee39, caps, omega_weight=5.0))
        heavy = riccati_check(ieee39_grid, case_study_weights(ieee39, caps, omega_weight=3000.0))
        assert light.min_eig_a > heavy.min_eig_a
        assert not heavy.attacker_ok

    def test_ieee39_heavy_frequency_weight_certified(self, ieee39, ieee39_grid):
        weights = case_study_weights(ieee39, ieee39.load_caps(166.4),
                                     r_d=0.005, omega_weight=1000.0)
        assert riccati_check(ieee39_grid, weights).certified


class TestAttackerRoot:
    def test_zero_cap_zero_push(self):
        r, mu = 3.0, 2.0
        assert attacker_root(r, 0.0, 0.0, mu) == pytest.approx(-math.sqrt(8 * r / mu) / (4 * r))

    def test_large_mu_limit(self):
        assert attacker_root(2.0, 10.0, 4.0, 1e12) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("r,v,b,mu", [
        (1.0, 1.0, 0.0, 1.0),
        (100.0, 20.8, 5e3, 2.0),
        (100.0, 20.8, -5e3, 50.0),
        (0.2, 1e-3, 1e-6, 1e4),
    ])
    def test_stationary_and_feasible(self, r, v, b, mu):
        P = attacker_root(r, v, b, mu)
        assert P < v
        quad = 2 * r * P * P - (2 * r * v + b) * P + b * v - 1 / mu
        scale = 2 * r * P * P + abs(2 * r * v + b) * abs(P) + abs(b * v) + 1 / mu
        assert abs(quad) <= 1e-12 * scale

    def test_is_the_maximum(self):
        r, v, b, mu = 1.0, 0.5, 2.0, 3.0
        P = attacker_root(r, v, b, mu)
        grid = np.linspace(v - 5.0, v - 1e-9, 200001)
        h = b * grid - r * grid ** 2 + np.log(v - grid) / mu
        assert grid[np.argmax(h)] == pytest.approx(P, abs=1e-4)


class TestUnconstrained:
    def test_equilibrium_start_is_stationary(self, toy_grid, toy_weights):
        sol = solve_unconstrained(toy_grid, toy_weights, operating_point(toy_grid))
        np.testing.assert_allclose(sol.Pd, 0.0, atol=1e-12)
        np.testing.assert_allclose(sol.Pa, 0.0, atol=1e-12)
        np.testing.assert_allclose(sol.lam, 0.0, atol=1e-12)

    def test_residual(self, toy_grid, toy_weights, toy_x0):
        sol = solve_unconstrained(toy_grid, toy_weights, toy_x0)
        assert sol.residual <= 1e-8
        assert sol.certified
        assert pmp_residual(toy_grid, toy_weights, toy_x0, sol) == pytest.approx(sol.residual)
        assert sol.x.shape == (3, 11)
        assert sol.lam.shape == (3, 10)

    def test_residual_is_absolute(self, toy_grid, toy_weights, toy_x0):
        import dataclasses

        sol = solve_unconstrained(toy_grid, toy_weights, toy_x0)
        nudged = sol.Pd.copy()
        nudged[0, 0] += 0.01
        off = dataclasses.replace(sol, Pd=nudged)
        # defender stationarity 2·R_d·P^d + B_d'λ moves by 2·1·0.01
        assert pmp_residual(toy_grid, toy_weights, toy_x0, off) == pytest.approx(0.02, abs=1e-6)

    def test_expensive_attack_reduces_to_lqr(self, toy_grid, toy_weights, toy_x0):
        import dataclasses

        w = dataclasses.replace(toy_weights, R_a=np.array([1e9]))
        sol = solve_unconstrained(toy_grid, w, toy_x0)
        z0 = toy_x0 - operating_point(toy_grid)
        expected = _lqr_inputs(toy_grid.A, toy_grid.B_d, w.Q, w.Q_f, np.diag(w.R_d), 10, z0)
        np.testing.assert_allclose(sol.Pd, expected, rtol=1e-6, atol=1e-9)

    def test_saddle_property(self, toy_grid, toy_weights, toy_x0):
        sol = solve_unconstrained(toy_grid, toy_weights, toy_x0)
        J = objective(toy_grid, toy_weights, toy_x0, sol.Pd, sol.Pa)
        assert J == pytest.approx(sol.objective)
        rng = np.random.default_rng(11)
        for _ in range(100):
            dd = 0.1 * rng.normal(size=sol.Pd.shape)
            da = 0.1 * rng.normal(size=sol.Pa.shape)
            assert objective(toy_grid, toy_weights, toy_x0, sol.Pd + dd, sol.Pa) >= J - 1e-9
            assert objective(toy_grid, toy_weights, toy_x0, sol.Pd, sol.Pa + da) <= J + 1e-9

    def test_defender_gradient(self, toy_grid, toy_weights, toy_x0):
        rng = np.random.default_rng(5)
        Pd = rng.normal(size=(1, 10))
        Pa = rng.normal(size=(1, 10))
        x_ref = operating_point(toy_grid)
        lam = costates(toy_grid, toy_weights, simulate(toy_grid, toy_x0, Pd, Pa), x_ref)
        grad = 2 * toy_weights.R_d[:, None] * Pd + toy_grid.B_d.T @ lam
        h = 1e-5
        for t in (0, 4, 9):
            up, down = Pd.copy(), Pd.copy()
            up[0, t] += h
            down[0, t] -= h
            fd = (objective(toy_grid, toy_weights, toy_x0, up, Pa)
                  - objective(toy_grid, toy_weights, toy_x0, down, Pa)) / (2 * h)
            assert grad[0, t] == pytest.approx(fd, rel=1e-5)

    def test_rejects_wrong_state_size(self, toy_grid, toy_weights):
        with pytest.raises(InputValidationError):
            solve_unconstrained(toy_grid, toy_weights, np.zeros(4))


class TestBarrier:
    def test_inactive_caps_match_unconstrained(self, toy_grid, toy_weights, toy_x0):
        w = toy_weights.with_caps([1e9])
        free = solve_unconstrained(toy_grid, w, toy_x0)
        capped = solve_barrier(toy_grid, w, toy_x0, feasible_start(w, free))
        assert capped.converged
        np.testing.assert_allclose(capped.Pd, free.Pd, atol=1e-6)
        np.testing.assert_allclose(capped.Pa, free.Pa, atol=1e-6)

    def test_rejects_infeasible_init(self, toy_grid, toy_weights, toy_x0):
        import dataclasses

        w = toy_weights.with_caps([0.0])
        free = solve_unconstrained(toy_grid, w, toy_x0)
        on_cap = dataclasses.replace(free, Pa=np.zeros_like(free.Pa))
        with pytest.raises(InputValidationError):
            solve_barrier(toy_grid, w, toy_x0, on_cap)

    def test_binding_caps(self, toy_grid, toy_weights, toy_x0):
        w = toy_weights.with_caps([0.0])
        sol = refine(toy_grid, w, toy_x0)
        assert sol.converged
        assert sol.mu == pytest.approx(2.0 * 5.0 ** 2)
        assert np.all(w.restrict(sol.Pa) < 0.0)
        assert pmp_residual(toy_grid, w, toy_x0, sol, mu=sol.mu) <= 1e-8

    def test_capped_saddle(self, toy_grid, toy_weights, toy_x0):
        w = toy_weights.with_caps([0.01])
        sol = refine(toy_grid, w, toy_x0)
        assert pmp_residual(toy_grid, w, toy_x0, sol, mu=sol.mu) <= 1e-8
        J = objective(toy_grid, w, toy_x0, sol.Pd, sol.Pa, mu=sol.mu)
        rng = np.random.default_rng(2)
        for _ in range(200):
            trial = sol.Pa + 0.05 * rng.normal(size=sol.Pa.shape)
            if np.any(trial >= 0.01):
                continue
            assert objective(toy_grid, w, toy_x0, sol.Pd, trial, mu=sol.mu) <= J + 1e-9
        for _ in range(200):
            trial = sol.Pd + 0.05 * rng.normal(size=sol.Pd.shape)
            assert objective(toy_grid, w, toy_x0, trial, sol.Pa, mu=sol.mu) >= J - 1e-9

    def test_nonbinding_caps_are_mu_independent(self, toy_grid, toy_weights, toy_x0):
        import dataclasses

        w3 = toy_weights.with_caps([1e6])
        w4 = dataclasses.replace(w3, n_max=4)
        three, four = refine(toy_grid, w3, toy_x0), refine(toy_grid, w4, toy_x0)
        for sol in (three, four):
            assert pmp_residual(toy_grid, w3, toy_x0, sol, mu=sol.mu) <= 1e-8
        np.testing.assert_allclose(three.Pa, four.Pa, atol=1e-6)


STRATEGIC_FLOOR = 0.1


@pytest.mark.slow
class TestIEEE39Strategic:
    @pytest.fixture(scope="class")
    def solution(self, ieee39_grid, ieee39_weights):
        return refine(ieee39_grid, ieee39_weights, operating_point(ieee39_grid))

    def test_converged_with_absolute_residual(self, ieee39_grid, ieee39_weights, solution):
        assert solution.converged
        x0 = operating_point(ieee39_grid)
        assert pmp_residual(ieee39_grid, ieee39_weights, x0, solution, mu=solution.mu) <= 1e-8

    def test_attack_is_active_on_every_vulnerable_bus(self, ieee39_weights, solution):
        Pa_v = ieee39_weights.restrict(solution.Pa)
        assert np.all(Pa_v > STRATEGIC_FLOOR)
        assert np.all(Pa_v < ieee39_weights.load_caps[:, None])
        assert Pa_v[:, 0].max() > 0.3

    def test_attack_leaves_other_loads_alone(self, ieee39, ieee39_weights, solution):
        others = np.setdiff1d(np.arange(ieee39.n_l), ieee39_weights.attack_index)
        np.testing.assert_array_equal(solution.Pa[others], 0.0)

    def test_barrier_saddle(self, ieee39_grid, ieee39_weights, solution):
        x0 = operating_point(ieee39_grid)
        w = ieee39_weights
        J = objective(ieee39_grid, w, x0, solution.Pd, solution.Pa, mu=solution.mu)
        rng = np.random.default_rng(17)
        for _ in range(200):
            da = np.zeros_like(solution.Pa)
            da[w.attack_index] = 0.05 * rng.normal(size=(w.attack_index.size, w.horizon))
            dd = 0.05 * rng.normal(size=solution.Pd.shape)
            assert objective(ieee39_grid, w, x0, solution.Pd, solution.Pa + da,
                             mu=solution.mu) <= J + 1e-6
            assert objective(ieee39_grid, w, x0, solution.Pd + dd, solution.Pa,
                             mu=solution.mu) >= J - 1e-6

    def test_expensive_attack_reduces_to_lqr(self, ieee39, ieee39_grid, ieee39_weights):
        import dataclasses

        w = dataclasses.replace(ieee39_weights, R_a=np.full(ieee39.n_v, 1e9),
                                cost_reference="operating_point")
        x_ref = operating_point(ieee39_grid)
        x0 = x_ref.copy()
        offsets = np.random.default_rng(3).uniform(-0.3, 0.3, ieee39.n_g)
        x0[ieee39_grid.model.omega] += ieee39_grid.model.from_hz(offsets)
        sol = solve_unconstrained(ieee39_grid, w, x0)
        expected = _lqr_inputs(ieee39_grid.A, ieee39_grid.B_d, w.Q, w.Q_f, np.diag(w.R_d),
                               w.horizon, x0 - x_ref)
        np.testing.assert_allclose(sol.Pd, expected, rtol=1e-5, atol=1e-8)
        np.testing.assert_allclose(sol.Pa, 0.0, atol=1e-6)
