"""
Physical min-max game weights and open-loop solutions.

Costs are measured on the deviation x - x_ref, where x_ref is the origin
(the printed quadratic cost on x itself) or the zero-input operating
point x*. Input sequences are stored column-per-time-step.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from resilgrid.core.exceptions import InputValidationError
from resilgrid.core.grid.dto import BusSystem
from resilgrid.core.utils.validation import validate_positive, validate_psd

COST_REFERENCES = ("origin", "operating_point")


@dataclass(frozen=True, eq=False)
class GameWeights:
    """Quadratic weights, horizon, barrier schedule and attack caps.

    ``R_d`` and ``R_a`` hold diagonals. ``R_a``, ``load_caps`` and
    ``attack_index`` are indexed by vulnerable bus; ``attack_index`` gives
    each vulnerable bus's position in the load ordering. ``barrier_tol``
    bounds the absolute necessary-condition residual of each barrier solve.
    """

    Q: np.ndarray
    Q_f: np.ndarray
    R_d: np.ndarray
    R_a: np.ndarray
    attack_index: np.ndarray
    load_caps: np.ndarray
    horizon: int = 20
    mu: float = 2.0
    alpha: float = 5.0
    n_max: int = 6
    cost_reference: Literal["origin", "operating_point"] = "operating_point"
    barrier_tol: float = 1e-8
    barrier_max_iter: int = 200

    def __post_init__(self) -> None:
        Q = validate_psd(self.Q, "Q")
        Q_f = validate_psd(self.Q_f, "Q_f")
        if Q.shape != Q_f.shape:
            raise InputValidationError(f"Q {Q.shape} and Q_f {Q_f.shape} differ in shape")
        R_d = np.atleast_1d(np.asarray(self.R_d, dtype=float))
        R_a = np.atleast_1d(np.asarray(self.R_a, dtype=float))
        idx = np.atleast_1d(np.asarray(self.attack_index, dtype=int))
        caps = np.atleast_1d(np.asarray(self.load_caps, dtype=float))
        if np.any(R_d <= 0) or np.any(R_a <= 0):
            raise InputValidationError("R_d and R_a must be positive definite")
        if not (R_a.shape == idx.shape == caps.shape):
            raise InputValidationError(
                f"R_a {R_a.shape}, attack_index {idx.shape} and load_caps {caps.shape} must match"
            )
        if np.any(caps < 0):
            raise InputValidationError("load caps must be nonnegative")
        if len(set(idx.tolist())) != idx.size:
            raise InputValidationError("attack_index contains duplicates")
        validate_positive(self.horizon, "horizon")
        validate_positive(self.mu, "mu")
        if not self.alpha > 1:
            raise InputValidationError(f"alpha must exceed 1, got {self.alpha}")
        validate_positive(self.n_max, "n_max")
        validate_positive(self.barrier_tol, "barrier_tol")
        validate_positive(self.barrier_max_iter, "barrier_max_iter")
        if self.cost_reference not in COST_REFERENCES:
            raise InputValidationError(
                f"cost_reference must be one of {COST_REFERENCES}, got {self.cost_reference!r}"
            )
        for name, value in (("Q", Q), ("Q_f", Q_f), ("R_d", R_d), ("R_a", R_a),
                            ("attack_index", idx), ("load_caps", caps)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "horizon", int(self.horizon))
        object.__setattr__(self, "n_max", int(self.n_max))
        object.__setattr__(self, "barrier_max_iter", int(self.barrier_max_iter))

    @property
    def n_v(self) -> int:
        return int(self.attack_index.size)

    def with_caps(self, caps: np.ndarray) -> GameWeights:
        return dataclasses.replace(self, load_caps=np.asarray(caps, dtype=float))

    def expand(self, Pa_v: np.ndarray, n_l: int) -> np.ndarray:
        """Place per-vulnerable-bus rows into an (N_L, T) array."""
        Pa_v = np.asarray(Pa_v, dtype=float)
        full = np.zeros((n_l,) + Pa_v.shape[1:])
        full[self.attack_index] = Pa_v
        return full

    def restrict(self, Pa: np.ndarray) -> np.ndarray:
        """Rows of an (N_L, T) attack array that belong to vulnerable buses."""
        Pa = np.asarray(Pa, dtype=float)
        outside = np.delete(Pa, self.attack_index, axis=0)
        if outside.size and np.any(outside != 0.0):
            raise InputValidationError("attack inputs must be zero outside the vulnerable buses")
        return Pa[self.attack_index]


@dataclass(frozen=True, eq=False)
class OpenLoopSolution:
    """Open-loop saddle trajectories over one horizon.

    ``lam[:, t - 1]`` is the costate λ_t for t = 1..T. ``mu`` is None for
    the uncapped game.
    """

    Pd: np.ndarray
    Pa: np.ndarray
    x: np.ndarray
    lam: np.ndarray
    objective: float
    residual: float
    converged: bool = True
    certified: bool = True
    mu: Optional[float] = None
    iterations: int = 0

    @property
    def horizon(self) -> int:
        return int(self.Pd.shape[1])


def case_study_weights(
    system: BusSystem,
    caps: np.ndarray,
    horizon: int = 20,
    r_d: float = 0.2,
    r_a: float = 0.05,
    omega_weight: float = 5.0,
    angle_weight: float = 1.0,
    terminal_scale: float = 5.0,
    mu: float = 2.0,
    alpha: float = 5.0,
    n_max: int = 6,
    cost_reference: str = "origin",
    barrier_tol: float = 1e-8,
    barrier_max_iter: int = 200,
) -> GameWeights:
    """Q = diag(a·I, a·I, w·I) over (δ, θ, ω), Q_f = s·Q, scalar R_d and R_a.

    The cost is taken on the state itself unless ``cost_reference`` says
    "operating_point".
    """
    q = np.concatenate([angle_weight * np.ones(system.n_g + system.n_l),
                        omega_weight * np.ones(system.n_g)])
    Q = np.diag(q)
    return GameWeights(
        Q=Q,
        Q_f=terminal_scale * Q,
        R_d=np.full(system.n_g, r_d),
        R_a=np.full(system.n_v, r_a),
        attack_index=system.vulnerable_index,
        load_caps=np.asarray(caps, dtype=float),
        horizon=horizon,
        mu=mu,
        alpha=alpha,
        n_max=n_max,
        cost_reference=cost_reference,
        barrier_tol=barrier_tol,
        barrier_max_iter=barrier_max_iter,
    )
