"""
Open-loop solution of the finite-horizon min-max grid game.

The defender minimizes and the attacker maximizes

    J = Σ_{t<T} (z_tᵀQ z_t + P^dᵀR_d P^d - P^aᵀR_a P^a) + z_Tᵀ Q_f z_T

over z = x - x_ref, subject to the sampled grid dynamics. x_ref is the
origin or the operating point x*, as the weights choose. With attack
caps the attacker's payoff gains (1/μ)·Σ log(v_i - P^a_{t,i}).

The necessary conditions are linear in the uncapped game and are solved
by one backward affine sweep (λ_t = 2(S_t z_t + s_t)). The capped game
is solved by Newton steps on the same conditions: each step quadratizes
the barrier around the current attack and solves the resulting LQ game
by the sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from resilgrid.core.exceptions import ConvergenceError, InputValidationError, SingularSweepError
from resilgrid.core.grid.discrete import operating_point, simulate
from resilgrid.core.grid.dto import DiscreteGrid
from resilgrid.core.physical_game.dto import GameWeights, OpenLoopSolution
from resilgrid.core.physical_game.riccati import riccati_check
from resilgrid.core.utils.logger import get_logger

logger = get_logger("physical_game")

FRACTION_TO_BOUNDARY = 0.995
MIN_RELAXATION = 1e-10


@dataclass(frozen=True, eq=False)
class _Problem:
    """Deviation-coordinate data shared by the solvers.

    ``drift`` is Ãx_ref + c̃ - x_ref, the constant term of the dynamics
    in z; it vanishes when x_ref is the operating point.
    """

    A: np.ndarray
    B_d: np.ndarray
    B_v: np.ndarray
    x0: np.ndarray
    x_ref: np.ndarray
    z0: np.ndarray
    drift: np.ndarray
    certified: bool


def cost_reference(grid: DiscreteGrid, weights: GameWeights) -> np.ndarray:
    """State the cost is measured from: the origin or the operating point."""
    if weights.cost_reference == "origin":
        return np.zeros(grid.dim)
    return operating_point(grid)


def _problem(
    grid: DiscreteGrid,
    weights: GameWeights,
    x0: np.ndarray,
    x_ref: np.ndarray,
    certified: bool,
) -> _Problem:
    return _Problem(
        A=grid.A,
        B_d=grid.B_d,
        B_v=grid.B_a[:, weights.attack_index],
        x0=x0,
        x_ref=x_ref,
        z0=x0 - x_ref,
        drift=grid.A @ x_ref + grid.c - x_ref,
        certified=bool(certified),
    )


def _prepare(
    grid: DiscreteGrid,
    weights: GameWeights,
    x0: np.ndarray,
    x_ref: Optional[np.ndarray],
    certified: Optional[bool],
) -> _Problem:
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (grid.dim,):
        raise InputValidationError(f"x0 must have shape ({grid.dim},), got {x0.shape}")
    if weights.Q.shape != (grid.dim, grid.dim):
        raise InputValidationError(f"Q is {weights.Q.shape}, grid state has dimension {grid.dim}")
    if weights.R_d.shape != (grid.n_g,):
        raise InputValidationError(f"R_d needs {grid.n_g} entries, got {weights.R_d.shape}")
    if np.any(weights.attack_index >= grid.n_l):
        raise InputValidationError("attack_index points past the load buses")
    x_ref = cost_reference(grid, weights) if x_ref is None else np.asarray(x_ref, dtype=float)
    if x_ref.shape != (grid.dim,):
        raise InputValidationError(f"x_ref must have shape ({grid.dim},), got {x_ref.shape}")
    if certified is None:
        certified = riccati_check(grid, weights).certified
    return _problem(grid, weights, x0, x_ref, certified)


def _sweep(
    prob: _Problem,
    weights: GameWeights,
    R_hat: np.ndarray,
    e: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """Saddle controls of the LQ game with attacker weights R̂_t and linear terms e_t.

    The attacker's stage payoff is -PᵀR̂_t P + 2e_tᵀP, so its stationarity
    reads P = R̂_t^-1 (½ B_vᵀλ_{t+1} + e_t).
    """
    A, B_d, B_v = prob.A, prob.B_d, prob.B_v
    n, T = A.shape[0], weights.horizon
    G_d = (B_d / weights.R_d) @ B_d.T
    eye = np.eye(n)

    S = np.empty((T + 1, n, n))
    s = np.empty((T + 1, n))
    S[T], s[T] = weights.Q_f, 0.0
    LA = np.empty((T, n, n))
    Lv = np.empty((T, n))
    for t in range(T - 1, -1, -1):
        G = G_d - (B_v / R_hat[:, t]) @ B_v.T
        shift = B_v @ (e[:, t] / R_hat[:, t]) + prob.drift
        rhs = np.column_stack([A, shift - G @ s[t + 1]])
        try:
            sol = np.linalg.solve(eye + G @ S[t + 1], rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularSweepError(t) from exc
        if not np.all(np.isfinite(sol)):
            raise SingularSweepError(t)
        LA[t], Lv[t] = sol[:, :n], sol[:, n]
        S[t] = weights.Q + A.T @ S[t + 1] @ LA[t]
        s[t] = A.T @ (S[t + 1] @ Lv[t] + s[t + 1])

    n_g, n_v = B_d.shape[1], B_v.shape[1]
    Pd = np.empty((n_g, T))
    Pa_v = np.empty((n_v, T))
    z = prob.z0.copy()
    for t in range(T):
        z = LA[t] @ z + Lv[t]
        lam = 2.0 * (S[t + 1] @ z + s[t + 1])
        Pd[:, t] = -0.5 * (B_d.T @ lam) / weights.R_d
        Pa_v[:, t] = (0.5 * (B_v.T @ lam) + e[:, t]) / R_hat[:, t]
    return Pd, Pa_v


def _costates(prob: _Problem, weights: GameWeights, Z: np.ndarray) -> np.ndarray:
    T = Z.shape[1] - 1
    lam = np.empty((Z.shape[0], T))
    lam[:, T - 1] = 2.0 * weights.Q_f @ Z[:, T]
    for t in range(T - 1, 0, -1):
        lam[:, t - 1] = prob.A.T @ lam[:, t] + 2.0 * weights.Q @ Z[:, t]
    return lam


def costates(
    grid: DiscreteGrid,
    weights: GameWeights,
    x: np.ndarray,
    x_ref: Optional[np.ndarray] = None,
) -> np.ndarray:
    """λ_1..λ_T for a state trajectory x (n, T+1), as columns."""
    x = np.asarray(x, dtype=float)
    x_ref = cost_reference(grid, weights) if x_ref is None else np.asarray(x_ref, dtype=float)
    prob = _problem(grid, weights, x[:, 0], x_ref, True)
    return _costates(prob, weights, x - x_ref[:, None])


def attacker_root(r: float, v: float, b: float, mu: float) -> float:
    """Maximizer of b·P - r·P² + (1/μ)·log(v - P) over P < v.

    It is the smaller root of 2rP² - (2rv + b)P + bv - 1/μ = 0, with
    discriminant (2rv - b)² + 8r/μ. Evaluated without cancellation.
    """
    a = 2.0 * r
    neg_b = 2.0 * r * v + b
    c = b * v - 1.0 / mu
    root_disc = math.sqrt((2.0 * r * v - b) ** 2 + 8.0 * r / mu)
    if neg_b >= 0.0:
        return c / (0.5 * (neg_b + root_disc))
    return 0.5 * (neg_b - root_disc) / a


_attacker_root_v = np.vectorize(attacker_root, otypes=[float])


def _stage_cost(weights: GameWeights, Z: np.ndarray, Pd: np.ndarray, Pa_v: np.ndarray) -> float:
    T = Pd.shape[1]
    states = np.einsum("it,ij,jt->", Z[:, :T], weights.Q, Z[:, :T])
    defense = np.sum(weights.R_d[:, None] * Pd ** 2)
    attack = np.sum(weights.R_a[:, None] * Pa_v ** 2)
    terminal = Z[:, T] @ weights.Q_f @ Z[:, T]
    return float(states + defense - attack + terminal)


def _barrier(weights: GameWeights, Pa_v: np.ndarray, mu: float) -> float:
    slack = weights.load_caps[:, None] - Pa_v
    if np.any(slack <= 0.0):
        return -math.inf
    return float(np.sum(np.log(slack)) / mu)


def objective(
    grid: DiscreteGrid,
    weights: GameWeights,
    x0: np.ndarray,
    Pd: np.ndarray,
    Pa: np.ndarray,
    mu: Optional[float] = None,
    x_ref: Optional[np.ndarray] = None,
) -> float:
    """J, or the barrier payoff J̃ when ``mu`` is given (-inf off the cap domain).

    ``Pa`` covers all load buses and must vanish outside the vulnerable set.
    """
    x_ref = cost_reference(grid, weights) if x_ref is None else np.asarray(x_ref, dtype=float)
    Pd = np.asarray(Pd, dtype=float)
    Pa = np.asarray(Pa, dtype=float)
    Pa_v = weights.restrict(Pa)
    Z = simulate(grid, x0, Pd, Pa) - x_ref[:, None]
    J = _stage_cost(weights, Z, Pd, Pa_v)
    if mu is None:
        return J
    return J + _barrier(weights, Pa_v, mu)


def _defect(lhs: np.ndarray, rhs: np.ndarray) -> float:
    if lhs.size == 0:
        return 0.0
    return float(np.max(np.abs(lhs - rhs)))


def _residual(
    grid: DiscreteGrid,
    weights: GameWeights,
    prob: _Problem,
    X: np.ndarray,
    lam: np.ndarray,
    Pd: np.ndarray,
    Pa_v: np.ndarray,
    mu: Optional[float],
) -> float:
    Z = X - prob.x_ref[:, None]
    T = Pd.shape[1]
    Pa = weights.expand(Pa_v, grid.n_l)
    rolled = grid.A @ X[:, :T] + grid.B_d @ Pd + grid.B_a @ Pa + grid.c[:, None]
    dyn = _defect(X[:, 1:], rolled)

    lam_next = np.column_stack([lam[:, 1:], np.zeros(grid.dim)])
    rhs = prob.A.T @ lam_next + 2.0 * weights.Q @ Z[:, 1:]
    rhs[:, T - 1] = 2.0 * weights.Q_f @ Z[:, T]
    cost = _defect(lam, rhs)

    defender = _defect(2.0 * weights.R_d[:, None] * Pd, -(prob.B_d.T @ lam))
    b = prob.B_v.T @ lam
    if mu is None:
        attacker = _defect(2.0 * weights.R_a[:, None] * Pa_v, b)
    else:
        roots = _attacker_root_v(weights.R_a[:, None], weights.load_caps[:, None], b, mu)
        attacker = _defect(Pa_v, roots)
    return max(dyn, cost, defender, attacker)


def pmp_residual(
    grid: DiscreteGrid,
    weights: GameWeights,
    x0: np.ndarray,
    solution: OpenLoopSolution,
    mu: Optional[float] = None,
    x_ref: Optional[np.ndarray] = None,
) -> float:
    """Largest absolute defect over dynamics, costate and both stationarity
    conditions, in max norm. With ``mu`` the attacker condition is the
    barrier one.
    """
    prob = _prepare(grid, weights, x0, x_ref, certified=True)
    Pa_v = weights.restrict(solution.Pa)
    return _residual(grid, weights, prob, solution.x, solution.lam, solution.Pd, Pa_v, mu)


def _package(
    grid: DiscreteGrid,
    weights: GameWeights,
    prob: _Problem,
    Pd: np.ndarray,
    Pa_v: np.ndarray,
    mu: Optional[float],
    converged: bool = True,
    iterations: int = 0,
) -> OpenLoopSolution:
    Pa = weights.expand(Pa_v, grid.n_l)
    X = simulate(grid, prob.x0, Pd, Pa)
    Z = X - prob.x_ref[:, None]
    lam = _costates(prob, weights, Z)
    J = _stage_cost(weights, Z, Pd, Pa_v)
    if mu is not None:
        J += _barrier(weights, Pa_v, mu)
    return OpenLoopSolution(
        Pd=Pd,
        Pa=Pa,
        x=X,
        lam=lam,
        objective=J,
        residual=_residual(grid, weights, prob, X, lam, Pd, Pa_v, mu),
        converged=converged,
        certified=prob.certified,
        mu=mu,
        iterations=iterations,
    )


def solve_unconstrained(
    grid: DiscreteGrid,
    weights: GameWeights,
    x0: np.ndarray,
    x_ref: Optional[np.ndarray] = None,
    certified: Optional[bool] = None,
) -> OpenLoopSolution:
    """Saddle trajectories of the uncapped game from one affine sweep."""
    prob = _prepare(grid, weights, x0, x_ref, certified)
    T = weights.horizon
    R_hat = np.repeat(weights.R_a[:, None], T, axis=1)
    Pd, Pa_v = _sweep(prob, weights, R_hat, np.zeros_like(R_hat))
    sol = _package(grid, weights, prob, Pd, Pa_v, mu=None)
    if not sol.certified:
        logger.warning("Riccati gate failed: solution is stationary but uncertified")
    logger.debug("unconstrained solve: J=%.6e residual=%.2e", sol.objective, sol.residual)
    return sol


def _quadratize(
    weights: GameWeights, Pa_v: np.ndarray, mu: float
) -> Tuple[np.ndarray, np.ndarray]:
    r = weights.R_a[:, None]
    slack = weights.load_caps[:, None] - Pa_v
    g0 = -1.0 / (mu * slack)
    g1 = -1.0 / (mu * slack ** 2)
    return r - 0.5 * g1, 0.5 * (g0 - g1 * Pa_v)


def _boundary_step(weights: GameWeights, Pa_v: np.ndarray, target: np.ndarray) -> float:
    rise = target - Pa_v
    up = rise > 0.0
    if not np.any(up):
        return 1.0
    slack = (weights.load_caps[:, None] - Pa_v)[up]
    return float(min(1.0, FRACTION_TO_BOUNDARY * np.min(slack / rise[up])))


def solve_barrier(
    grid: DiscreteGrid,
    weights: GameWeights,
    x0: np.ndarray,
    init: OpenLoopSolution,
    mu: Optional[float] = None,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    eta: float = 0.5,
    x_ref: Optional[np.ndarray] = None,
    certified: Optional[bool] = None,
) -> OpenLoopSolution:
    """Stationary point of the capped game for barrier weight ``mu``.

    Damped Newton iteration from a strictly feasible ``init``. The
    relaxation η halves when a step raises the residual and doubles
    (up to 1) after an accepted step. If the residual never drops
    below ``tol``, the best iterate comes back flagged not converged.
    ``tol`` and ``max_iter`` default to the weights' barrier settings.
    """
    mu = weights.mu if mu is None else float(mu)
    tol = weights.barrier_tol if tol is None else float(tol)
    max_iter = weights.barrier_max_iter if max_iter is None else int(max_iter)
    prob = _prepare(grid, weights, x0, x_ref, certified)
    Pd = np.array(init.Pd, dtype=float)
    Pa_v = weights.restrict(init.Pa)
    if Pd.shape != (grid.n_g, weights.horizon) or Pa_v.shape[1] != weights.horizon:
        raise InputValidationError("init does not match the game horizon")
    if np.any(Pa_v >= weights.load_caps[:, None]):
        raise InputValidationError("init must be strictly below the load caps")

    current = _package(grid, weights, prob, Pd, Pa_v, mu)
    best = current
    iterations = 0
    while current.residual > tol and iterations < max_iter:
        iterations += 1
        R_hat, e = _quadratize(weights, Pa_v, mu)
        Pd_new, Pa_new = _sweep(prob, weights, R_hat, e)
        step = min(eta, _boundary_step(weights, Pa_v, Pa_new))
        while step >= MIN_RELAXATION:
            trial_d = Pd + step * (Pd_new - Pd)
            trial_a = Pa_v + step * (Pa_new - Pa_v)
            trial = _package(grid, weights, prob, trial_d, trial_a, mu)
            if trial.residual < current.residual:
                break
            eta = max(0.5 * eta, MIN_RELAXATION)
            step = 0.5 * step
            iterations += 1
        else:
            logger.debug("barrier solve stalled at residual %.3e", current.residual)
            break
        Pd, Pa_v, current = trial_d, trial_a, trial
        eta = min(1.0, 2.0 * eta)
        if current.residual < best.residual:
            best = current
        logger.debug("barrier iteration %d: residual=%.3e step=%.3g", iterations,
                     current.residual, step)

    converged = best.residual <= tol
    if not converged:
        logger.warning("barrier solve (mu=%g) stopped at residual %.3e after %d iterations",
                       mu, best.residual, iterations)
    return OpenLoopSolution(
        Pd=best.Pd, Pa=best.Pa, x=best.x, lam=best.lam, objective=best.objective,
        residual=best.residual, converged=converged, certified=best.certified,
        mu=mu, iterations=iterations,
    )


def feasible_start(weights: GameWeights, solution: OpenLoopSolution) -> OpenLoopSolution:
    """Clamp the attack of ``solution`` strictly below the caps."""
    caps = weights.load_caps[:, None]
    margin = 1e-3 * (1.0 + caps)
    Pa_v = np.minimum(weights.restrict(solution.Pa), caps - margin)
    return OpenLoopSolution(
        Pd=solution.Pd,
        Pa=weights.expand(Pa_v, solution.Pa.shape[0]),
        x=solution.x,
        lam=solution.lam,
        objective=solution.objective,
        residual=solution.residual,
        converged=False,
        certified=solution.certified,
    )


def refine(
    grid: DiscreteGrid,
    weights: GameWeights,
    x0: np.ndarray,
    x_ref: Optional[np.ndarray] = None,
    certified: Optional[bool] = None,
) -> OpenLoopSolution:
    """Barrier continuation: μ ← α·μ for ``n_max`` rounds.

    Starts from the uncapped saddle clamped below the caps; every round
    warm-starts from the previous one.
    """
    x_ref = cost_reference(grid, weights) if x_ref is None else np.asarray(x_ref, dtype=float)
    if certified is None:
        certified = riccati_check(grid, weights).certified
    sol = feasible_start(weights, solve_unconstrained(grid, weights, x0, x_ref, certified))
    mu = weights.mu
    for rnd in range(weights.n_max):
        sol = solve_barrier(grid, weights, x0, sol, mu=mu, x_ref=x_ref, certified=certified)
        if not sol.converged:
            raise ConvergenceError("refine", sol.iterations, sol.residual, partial=sol)
        logger.debug("refine round %d: mu=%g J=%.6e", rnd + 1, mu, sol.objective)
        mu *= weights.alpha
    return sol
