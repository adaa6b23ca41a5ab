"""
Backward Riccati recursions certifying a unique open-loop saddle.

    S^d_t = Q + AᵀS^d A - AᵀS^d B_d (R_d + B_dᵀS^d B_d)^-1 B_dᵀS^d A
    S^a_t = Q + AᵀS^a A + AᵀS^a B_a (R_a - B_aᵀS^a B_a)^-1 B_aᵀS^a A

with S_T = Q_f. The defender test needs R_d + B_dᵀS^d_{t+1}B_d ≻ 0 and the
attacker test R_a - B_aᵀS^a_{t+1}B_a ≻ 0 for t = 0..T-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from resilgrid.core.grid.dto import DiscreteGrid
from resilgrid.core.physical_game.dto import GameWeights
from resilgrid.core.utils.logger import get_logger

logger = get_logger("physical_game.riccati")

PD_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class RiccatiReport:
    """Outcome of both recursions; S arrays are indexed S[t] for t = 0..T."""

    defender_ok: bool
    attacker_ok: bool
    S_d: np.ndarray
    S_a: np.ndarray
    min_eig_d: float
    min_eig_a: float

    @property
    def certified(self) -> bool:
        return self.defender_ok and self.attacker_ok


def _min_eig(M: np.ndarray) -> float:
    if M.size == 0:
        return float("inf")
    return float(np.linalg.eigvalsh(0.5 * (M + M.T)).min())


def _recursion(
    A: np.ndarray,
    B: np.ndarray,
    Q: np.ndarray,
    Q_f: np.ndarray,
    R: np.ndarray,
    T: int,
    sign: float,
) -> Tuple[bool, np.ndarray, float]:
    # sign=+1 is the minimizing player, sign=-1 the maximizing one
    n = A.shape[0]
    S = np.full((T + 1, n, n), np.nan)
    S[T] = Q_f
    worst = np.inf
    for t in range(T - 1, -1, -1):
        SB = S[t + 1] @ B
        gate = R + sign * (B.T @ SB)
        eig = _min_eig(gate)
        worst = min(worst, eig)
        if eig <= PD_TOLERANCE:
            return False, S, worst
        SA = S[t + 1] @ A
        S[t] = Q + A.T @ SA
        if B.shape[1]:
            S[t] -= sign * (SA.T @ B) @ np.linalg.solve(gate, SB.T @ A)
    return True, S, worst


def riccati_defender(A, B_d, Q, Q_f, R_d, T) -> Tuple[bool, np.ndarray, float]:
    """Defender recursion; R_d is a matrix or its diagonal."""
    R = np.diag(np.atleast_1d(R_d)) if np.ndim(R_d) <= 1 else np.asarray(R_d)
    return _recursion(np.atleast_2d(A), np.atleast_2d(B_d), np.atleast_2d(Q),
                      np.atleast_2d(Q_f), R, int(T), sign=1.0)


def riccati_attacker(A, B_a, Q, Q_f, R_a, T) -> Tuple[bool, np.ndarray, float]:
    """Attacker recursion; B_a holds only the attacked input columns."""
    R = np.diag(np.atleast_1d(R_a)) if np.ndim(R_a) <= 1 else np.asarray(R_a)
    return _recursion(np.atleast_2d(A), np.atleast_2d(B_a), np.atleast_2d(Q),
                      np.atleast_2d(Q_f), R, int(T), sign=-1.0)


def riccati_check(grid: DiscreteGrid, weights: GameWeights) -> RiccatiReport:
    """Run both recursions on the sampled grid; failures come back as flags."""
    T = weights.horizon
    d_ok, S_d, eig_d = riccati_defender(grid.A, grid.B_d, weights.Q, weights.Q_f,
                                        weights.R_d, T)
    B_v = grid.B_a[:, weights.attack_index]
    a_ok, S_a, eig_a = riccati_attacker(grid.A, B_v, weights.Q, weights.Q_f,
                                        weights.R_a, T)
    if not d_ok:
        logger.warning("defender Riccati gate fails (min eigenvalue %.3e)", eig_d)
    if not a_ok:
        logger.warning("attacker Riccati gate fails (min eigenvalue %.3e)", eig_a)
    return RiccatiReport(
        defender_ok=d_ok,
        attacker_ok=a_ok,
        S_d=S_d,
        S_a=S_a,
        min_eig_d=eig_d,
        min_eig_a=eig_a,
    )
