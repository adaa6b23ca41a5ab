"""
Degree-based mean-field SIS dynamics and risk measures.

    dI_k/dt = -γ I_k + ζ k (1 - I_k) Θ(t),   Θ = Σ_k k p(k) I_k / <k>

Steady states come from the self-consistency equation on Θ (bisection)
or from the continuum approximation over k ∈ [d_min, ∞).
"""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np
from scipy.optimize import bisect

from resilgrid.core.epidemic.dto import (
    DegreeDistribution,
    EpidemicParams,
    EpidemicState,
    FleetParams,
)
from resilgrid.core.exceptions import IntegrationInstabilityError, InputValidationError
from resilgrid.core.utils.logger import get_logger
from resilgrid.core.utils.validation import validate_positive

logger = get_logger("epidemic")

BOX_TOLERANCE = 1e-9
THETA_TOLERANCE = 1e-12
SCALE_FREE_EXPONENT = 3.0


def scale_free_distribution(d_min: int, k_max: int) -> DegreeDistribution:
    """Truncated power law p(k) ∝ k^-3 on [d_min, k_max]."""
    if d_min < 1 or k_max < d_min:
        raise InputValidationError(
            f"scale-free support needs 1 <= d_min <= k_max, got d_min={d_min}, k_max={k_max}"
        )
    k = np.arange(d_min, k_max + 1, dtype=float)
    weights = k ** (-SCALE_FREE_EXPONENT)
    return DegreeDistribution(d_min=d_min, k_max=k_max, p=weights / weights.sum())


def epidemic_threshold(dist: DegreeDistribution) -> float:
    """<k²>/<k>; the infection dies out iff γ/ζ >= this value."""
    return dist.second_moment / dist.mean


def _check_support(state: EpidemicState, dist: DegreeDistribution) -> None:
    if state.I.shape != (dist.size,):
        raise InputValidationError(
            f"state has {state.I.size} degree classes, distribution has {dist.size}"
        )


def _theta(I: np.ndarray, dist: DegreeDistribution) -> float:
    return float(np.dot(dist.degrees * dist.p, I) / dist.mean)


def theta(state: EpidemicState, dist: DegreeDistribution) -> float:
    """Probability that a random link points at an infected device."""
    _check_support(state, dist)
    return _theta(state.I, dist)


def cyber_risk(state: EpidemicState, dist: DegreeDistribution) -> float:
    """Aggregated compromised fraction I(t) = Σ_k p(k) I_k."""
    _check_support(state, dist)
    return float(np.dot(dist.p, state.I))


def systemic_risk(I: float, fleet: FleetParams) -> float:
    """Controllable attack power I·N_d·W_d in p.u."""
    return float(I) * fleet.capacity_pu


def default_time_step(params: EpidemicParams, dist: DegreeDistribution) -> float:
    """Conservative RK4 step for the stiffest degree class."""
    return 0.01 / max(params.gamma, params.zeta * dist.k_max)


def _rhs(I: np.ndarray, params: EpidemicParams, dist: DegreeDistribution) -> np.ndarray:
    th = _theta(I, dist)
    return -params.gamma * I + params.zeta * dist.degrees * (1.0 - I) * th


def _rk4_step(
    I: np.ndarray, params: EpidemicParams, dist: DegreeDistribution, dt: float
) -> np.ndarray:
    k1 = _rhs(I, params, dist)
    k2 = _rhs(I + 0.5 * dt * k1, params, dist)
    k3 = _rhs(I + 0.5 * dt * k2, params, dist)
    k4 = _rhs(I + dt * k3, params, dist)
    nxt = I + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    low, high = float(nxt.min()), float(nxt.max())
    if low < -BOX_TOLERANCE or high > 1.0 + BOX_TOLERANCE:
        raise IntegrationInstabilityError(dt, low if low < 0 else high)
    return np.clip(nxt, 0.0, 1.0)


def integrate(
    state: EpidemicState,
    params: EpidemicParams,
    dist: DegreeDistribution,
    dt: float,
    steps: int,
) -> EpidemicState:
    """Advance the SIS field ``steps`` fixed RK4 steps of size ``dt``."""
    validate_positive(dt, "dt")
    _check_support(state, dist)
    I = np.array(state.I, dtype=float)
    for _ in range(int(steps)):
        I = _rk4_step(I, params, dist, dt)
    return EpidemicState(t=state.t + steps * dt, I=I)


def integrate_trajectory(
    state: EpidemicState,
    params: EpidemicParams,
    dist: DegreeDistribution,
    dt: float,
    steps: int,
    record_every: int = 1,
) -> Tuple[np.ndarray, np.ndarray, EpidemicState]:
    """Integrate and sample (t, I(t)) every ``record_every`` steps.

    Returns:
        times, aggregated risk at those times (including t0), final state.
    """
    validate_positive(dt, "dt")
    validate_positive(record_every, "record_every")
    _check_support(state, dist)
    I = np.array(state.I, dtype=float)
    times = [state.t]
    risks = [float(np.dot(dist.p, I))]
    for n in range(1, int(steps) + 1):
        I = _rk4_step(I, params, dist, dt)
        if n % record_every == 0:
            times.append(state.t + n * dt)
            risks.append(float(np.dot(dist.p, I)))
    final = EpidemicState(t=state.t + steps * dt, I=I)
    return np.asarray(times), np.asarray(risks), final


def steady_state(params: EpidemicParams, dist: DegreeDistribution) -> Tuple[float, float]:
    """Endemic equilibrium (Θ̄, Ī) of the discrete-degree model.

    Zero when γ/ζ >= <k²>/<k>; otherwise Θ̄ is the unique root in (0, 1] of
    Σ_k k p(k) ζk/(γ+ζkΘ) - <k>, found by bisection.
    """
    if params.gamma / params.zeta >= epidemic_threshold(dist):
        return 0.0, 0.0

    kp = dist.degrees * dist.p
    zk = params.zeta * dist.degrees

    def self_consistency(th: float) -> float:
        return float(np.dot(kp, zk / (params.gamma + zk * th)) - dist.mean)

    theta_bar = bisect(self_consistency, 0.0, 1.0, xtol=THETA_TOLERANCE, maxiter=200)
    I_bar = float(np.dot(dist.p, steady_state_densities(params, dist, theta_bar)))
    logger.debug("steady state: gamma=%g zeta=%g theta=%.12f I=%.12f",
                 params.gamma, params.zeta, theta_bar, I_bar)
    return float(theta_bar), I_bar


def steady_state_densities(
    params: EpidemicParams, dist: DegreeDistribution, theta_bar: float
) -> np.ndarray:
    """Per-degree equilibrium densities ζkΘ̄/(γ+ζkΘ̄)."""
    zk_theta = params.zeta * dist.degrees * theta_bar
    return zk_theta / (params.gamma + zk_theta)


def steady_state_continuum(params: EpidemicParams, d_min: int) -> Tuple[float, float]:
    """Closed-form (Θ̄, Ī) of the continuum approximation k ∈ [d_min, ∞)."""
    validate_positive(d_min, "d_min")
    x = params.gamma / (d_min * params.zeta)
    I_bar = math.exp(-x)
    theta_bar = x * I_bar / (-math.expm1(-x))
    return theta_bar, I_bar
