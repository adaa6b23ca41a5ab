"""
Sampled grid dynamics and rollouts.

Trajectories follow the column-per-time-step convention: inputs are
(N_G, T) and (N_L, T) arrays, states come back as (n, T+1).
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.linalg import expm

from resilgrid.core.exceptions import InputValidationError
from resilgrid.core.grid.dto import DiscreteGrid, GridModel
from resilgrid.core.utils.logger import get_logger
from resilgrid.core.utils.validation import validate_positive

logger = get_logger("grid.discrete")

METHODS = ("exact", "euler")


def discretize(model: GridModel, T_s: float, method: str = "exact") -> DiscreteGrid:
    """Zero-order-hold ("exact") or forward-Euler sampling with period T_s."""
    validate_positive(T_s, "T_s")
    n, g, m = model.dim, model.n_g, model.n_l
    if method == "exact":
        aug = np.zeros((n + g + m + 1, n + g + m + 1))
        aug[:n, :n] = model.A
        aug[:n, n:n + g] = model.B_d
        aug[:n, n + g:n + g + m] = model.B_a
        aug[:n, -1] = model.c
        E = expm(aug * T_s)
        A_d = E[:n, :n]
        Bd_d = E[:n, n:n + g]
        Ba_d = E[:n, n + g:n + g + m]
        c_d = E[:n, -1]
    elif method == "euler":
        A_d = np.eye(n) + T_s * model.A
        Bd_d = T_s * model.B_d
        Ba_d = T_s * model.B_a
        c_d = T_s * model.c
    else:
        raise InputValidationError(f"method must be one of {METHODS}, got {method!r}")
    logger.debug("discretized with %s at T_s=%g", method, T_s)
    return DiscreteGrid(A=A_d, B_d=Bd_d, B_a=Ba_d, c=c_d, T_s=float(T_s),
                        method=method, model=model)


def step(grid: DiscreteGrid, x: np.ndarray, pd: np.ndarray, pa: np.ndarray) -> np.ndarray:
    """One application of the affine map."""
    return grid.A @ x + grid.B_d @ pd + grid.B_a @ pa + grid.c


def simulate(
    grid: DiscreteGrid,
    x0: np.ndarray,
    Pd: Optional[np.ndarray] = None,
    Pa: Optional[np.ndarray] = None,
    steps: Optional[int] = None,
) -> np.ndarray:
    """Roll x_{t+1} = Ã x_t + B̃_d P^d_t + B̃_a P^a_t + c̃ forward.

    Missing input sequences are zero; ``steps`` is needed only when both
    are missing.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (grid.dim,):
        raise InputValidationError(f"x0 must have shape ({grid.dim},), got {x0.shape}")
    lengths = {np.shape(u)[1] for u in (Pd, Pa) if u is not None}
    if steps is not None:
        lengths.add(int(steps))
    if len(lengths) != 1:
        raise InputValidationError(f"cannot infer a single horizon from {sorted(lengths)}")
    T = lengths.pop()
    Pd = np.zeros((grid.n_g, T)) if Pd is None else np.asarray(Pd, dtype=float)
    Pa = np.zeros((grid.n_l, T)) if Pa is None else np.asarray(Pa, dtype=float)
    if Pd.shape != (grid.n_g, T) or Pa.shape != (grid.n_l, T):
        raise InputValidationError(
            f"inputs must be ({grid.n_g}, {T}) and ({grid.n_l}, {T}), got {Pd.shape} and {Pa.shape}"
        )

    X = np.empty((grid.dim, T + 1))
    X[:, 0] = x0
    for t in range(T):
        X[:, t + 1] = step(grid, X[:, t], Pd[:, t], Pa[:, t])
    return X


def operating_point(grid: DiscreteGrid) -> np.ndarray:
    """Fixed point x* = Ã x* + c̃ of the zero-input map."""
    try:
        return np.linalg.solve(np.eye(grid.dim) - grid.A, grid.c)
    except np.linalg.LinAlgError as exc:
        raise InputValidationError("zero-input map has no unique fixed point") from exc
