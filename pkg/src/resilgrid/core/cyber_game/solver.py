"""
Best responses and the Nash equilibrium of the cyber defense game.

The defender minimizes L_d = C_d(u_d) + Ī and the attacker maximizes
L_a = -C_a(u_a) + Ī. Both 1-D problems start from a 256-point bracketing
scan; stationary points are then refined with Brent's method.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from resilgrid.core.cyber_game.analysis import risk_bar, risk_partials
from resilgrid.core.cyber_game.dto import CyberEquilibrium, CyberGameSpec
from resilgrid.core.epidemic.dto import DegreeDistribution, FleetParams
from resilgrid.core.epidemic.model import epidemic_threshold, systemic_risk
from resilgrid.core.exceptions import ConvergenceError, InputValidationError
from resilgrid.core.utils.logger import get_logger
from resilgrid.core.utils.validation import validate_positive

logger = get_logger("cyber_game")

SCAN_POINTS = 256
ROOT_XTOL = 1e-14
# sqrt curves have an infinite slope at zero effort
_TINY_EFFORT = 1e-30


def _scan_grid(u_max: float) -> np.ndarray:
    return np.concatenate(([0.0], np.geomspace(u_max * 1e-6, u_max, SCAN_POINTS - 1)))


def _defender_gradient(spec: CyberGameSpec, u_d: float, u_a: float) -> float:
    u = max(u_d, _TINY_EFFORT)
    return spec.cost_d.d1(u) + risk_partials(spec, u, u_a).d_ud


def _attacker_gradient(spec: CyberGameSpec, u_d: float, u_a: float) -> float:
    return -spec.cost_a.d1(u_a) + risk_partials(spec, u_d, u_a).d_ua


def _refine_root(fn, a: float, b: float, solver: str) -> float:
    try:
        return float(brentq(fn, a, b, xtol=ROOT_XTOL, maxiter=500))
    except (RuntimeError, ValueError) as exc:
        raise ConvergenceError(solver, 500, float("nan")) from exc


def best_response_defender(spec: CyberGameSpec, u_a: float) -> float:
    """Unique minimizer of C_d(u_d) + Ī(u_d, u_a) on [0, u_max_d]."""
    if u_a < 0 or u_a > spec.u_max_a:
        raise InputValidationError(f"u_a={u_a} outside [0, {spec.u_max_a}]")
    grad = lambda u: _defender_gradient(spec, u, u_a)  # noqa: E731
    if grad(0.0) >= 0.0:
        return 0.0
    grid = _scan_grid(spec.u_max_d)
    for lo, hi in zip(grid[:-1], grid[1:]):
        if grad(hi) >= 0.0:
            return _refine_root(grad, max(lo, _TINY_EFFORT), hi, "best_response_defender")
    return spec.u_max_d


def _attacker_candidates(spec: CyberGameSpec, u_d: float) -> List[float]:
    grad = lambda u: _attacker_gradient(spec, u_d, u)  # noqa: E731
    grid = _scan_grid(spec.u_max_a)
    slopes = [grad(u) for u in grid]
    candidates = []
    if slopes[0] <= 0.0:
        candidates.append(0.0)
    for i in range(len(grid) - 1):
        if slopes[i] > 0.0 and slopes[i + 1] <= 0.0:
            candidates.append(_refine_root(grad, grid[i], grid[i + 1], "best_response_attacker"))
    if slopes[-1] > 0.0:
        candidates.append(spec.u_max_a)
    return candidates


def best_response_attacker(spec: CyberGameSpec, u_d: float) -> float:
    """Global maximizer of -C_a(u_a) + Ī(u_d, u_a) on [0, u_max_a].

    Every local maximum found by the scan is compared by value; equal
    values go to the smallest effort.
    """
    if u_d < 0 or u_d > spec.u_max_d:
        raise InputValidationError(f"u_d={u_d} outside [0, {spec.u_max_d}]")
    best_u, best_val = 0.0, -math.inf
    for u in sorted(_attacker_candidates(spec, u_d)):
        val = risk_bar(spec, u_d, u) - spec.cost_a.value(u)
        if val > best_val + 1e-15:
            best_u, best_val = u, val
    return best_u


def best_response_curve(
    spec: CyberGameSpec, player: str, efforts: Iterable[float], jobs: int = 1
) -> np.ndarray:
    """Sample BR_d over attacker efforts or BR_a over defender efforts."""
    if player == "defender":
        fn = lambda u: best_response_defender(spec, u)  # noqa: E731
    elif player == "attacker":
        fn = lambda u: best_response_attacker(spec, u)  # noqa: E731
    else:
        raise InputValidationError(f"player must be 'defender' or 'attacker', got {player!r}")
    points = list(efforts)
    if jobs <= 1:
        return np.array([fn(u) for u in points])
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return np.array(list(pool.map(fn, points)))


def nash_equilibrium(
    spec: CyberGameSpec,
    init: Tuple[float, float] = (1.0, 1.0),
    eps: float = 1e-8,
    max_iter: int = 200,
    fleet: Optional[FleetParams] = None,
    dist: Optional[DegreeDistribution] = None,
) -> CyberEquilibrium:
    """Simultaneous best-response iteration.

    Both players answer the previous iterate; stops once neither
    response moves by ``eps`` or more.
    """
    validate_positive(max_iter, "max_iter")
    validate_positive(eps, "eps")
    fleet = fleet or FleetParams()
    u_d, u_a = float(init[0]), float(init[1])
    if dist is not None:
        ratio = spec.gamma_curve.value(u_d) / spec.zeta_curve.value(u_a)
        if ratio >= epidemic_threshold(dist):
            raise InputValidationError(
                f"initial efforts start inside the epidemic-free region (γ/ζ={ratio:.4g})"
            )

    trace: List[float] = []
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):  # noqa: B007
        nxt_d = best_response_defender(spec, u_a)
        nxt_a = best_response_attacker(spec, u_d)
        step = max(abs(nxt_d - u_d), abs(nxt_a - u_a))
        trace.append(step)
        u_d, u_a = nxt_d, nxt_a
        logger.debug("NE iteration %d: u_d=%.10f u_a=%.10f step=%.3e", iterations, u_d, u_a, step)
        if step < eps:
            converged = True
            break

    I_bar = risk_bar(spec, u_d, u_a)
    if not converged:
        logger.warning("NE iteration stopped after %d steps (last step %.3e)", iterations, trace[-1])
    else:
        logger.debug("NE (%.6f, %.6f) with Ī=%.6f after %d iterations", u_d, u_a, I_bar, iterations)
    return CyberEquilibrium(
        u_d=u_d,
        u_a=u_a,
        I_bar=I_bar,
        R_bar=systemic_risk(I_bar, fleet),
        iterations=iterations,
        converged=converged,
        trace=trace,
    )
