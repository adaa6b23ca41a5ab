"""
Continuous linearized grid dynamics.

Generator buses follow the swing equation with a PI frequency loop,
load buses the frequency-sensitive power balance

    M ω̇ = -(K^P + D^G) ω - K^I δ - (B^GG δ + B^GL θ) + P^d
    D^L θ̇ = -(B^LG δ + B^LL θ + P^LS + P^a)

with δ̇ = ω and the load frequency φ = θ̇ eliminated.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from resilgrid.core.exceptions import DisconnectedGridError, InputValidationError
from resilgrid.core.grid.dto import AdmittancePartition, BusSystem, GridModel
from resilgrid.core.utils.logger import get_logger
from resilgrid.core.utils.units import hz_per_unit

logger = get_logger("grid")

LOAD_SIGN_NOTE = (
    "load rows carry -(D^L)^-1 on P^a and P^LS: a load increase decelerates "
    "its bus, the opposite sign of the printed block form"
)
_sign_note_logged = False


def build_admittance(system: BusSystem) -> AdmittancePartition:
    """Susceptance Laplacian of the branch graph, partitioned (G, L).

    Duplicate branches between the same bus pair are summed.
    """
    order = system.generator_buses + system.load_buses
    pos = {bus: i for i, bus in enumerate(order)}
    n = len(order)

    weights = {}
    for br in system.branches:
        a, b = pos[br.from_bus], pos[br.to_bus]
        key = (min(a, b), max(a, b))
        if key in weights:
            logger.warning("duplicate branch %d-%d: susceptances summed",
                           br.from_bus, br.to_bus)
            weights[key] += br.susceptance
        else:
            weights[key] = br.susceptance

    rows = [i for i, _ in weights] + [j for _, j in weights]
    cols = [j for _, j in weights] + [i for i, _ in weights]
    vals = list(weights.values()) * 2
    adjacency = coo_matrix((vals, (rows, cols)), shape=(n, n))
    count, labels = connected_components(adjacency, directed=False)
    if count > 1:
        components = [[order[i] for i in np.flatnonzero(labels == c)] for c in range(count)]
        raise DisconnectedGridError(components)

    dense = adjacency.toarray()
    L = np.diag(dense.sum(axis=1)) - dense
    g = system.n_g
    return AdmittancePartition(GG=L[:g, :g], GL=L[:g, g:], LG=L[g:, :g], LL=L[g:, g:])


def build_continuous(system: BusSystem) -> GridModel:
    """Assemble (A, B_d, B_a, c) for x = (δ, θ, ω)."""
    global _sign_note_logged
    Y = build_admittance(system)
    n_g, n_l = system.n_g, system.n_l

    M = np.array([g.inertia for g in system.generators])
    D_G = np.array([g.damping for g in system.generators])
    K_P = np.array([g.kp for g in system.generators])
    K_I = np.array([g.ki for g in system.generators])
    D_L = np.array([ld.damping for ld in system.loads])
    P_LS = np.array([ld.secure_load for ld in system.loads])

    I_g = np.eye(n_g)
    Z_gl = np.zeros((n_g, n_l))
    Z_lg = np.zeros((n_l, n_g))
    coupling = np.block([
        [np.zeros((n_g, n_g)), Z_gl, I_g],
        [Y.LG, Y.LL, Z_lg],
        [np.diag(K_I) + Y.GG, Y.GL, np.diag(K_P + D_G)],
    ])
    scaling = np.concatenate([np.ones(n_g), -1.0 / D_L, -1.0 / M])
    A = scaling[:, None] * coupling

    B_d = np.vstack([np.zeros((n_g, n_g)), np.zeros((n_l, n_g)), np.diag(1.0 / M)])
    B_a = np.vstack([Z_gl, -np.diag(1.0 / D_L), Z_gl])
    c = np.concatenate([np.zeros(n_g), -P_LS / D_L, np.zeros(n_g)])

    if not _sign_note_logged:
        logger.warning(LOAD_SIGN_NOTE)
        _sign_note_logged = True
    logger.debug("built %s: N_G=%d N_L=%d dim=%d", system.name, n_g, n_l, A.shape[0])
    return GridModel(
        A=A,
        B_d=B_d,
        B_a=B_a,
        c=c,
        n_g=n_g,
        n_l=n_l,
        admittance=Y,
        load_damping=D_L,
        secure_load=P_LS,
        omega_nominal=system.omega_nominal,
        hz_per_unit=hz_per_unit(system.frequency_unit, system.omega_nominal),
        notes=(LOAD_SIGN_NOTE,),
    )


def _column(vec: np.ndarray, ndim: int) -> np.ndarray:
    return np.reshape(vec, (-1,) + (1,) * (ndim - 1))


def recover_phi(
    model: GridModel,
    x: np.ndarray,
    P_ls: Optional[np.ndarray] = None,
    P_a: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Load-bus frequency φ = -(D^L)^-1 (B^LG δ + B^LL θ + P^LS + P^a).

    ``x`` is one state or a trajectory with states as columns; the
    injections then broadcast over time or match its columns.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] != model.dim:
        raise InputValidationError(f"state has {x.shape[0]} rows, model has {model.dim}")
    P_ls = model.secure_load if P_ls is None else np.asarray(P_ls, dtype=float)
    flow = model.admittance.LG @ x[model.delta] + model.admittance.LL @ x[model.theta]
    injection = _column(P_ls, x.ndim) if P_ls.ndim == 1 else P_ls
    if P_a is not None:
        P_a = np.asarray(P_a, dtype=float)
        injection = injection + (_column(P_a, x.ndim) if P_a.ndim == 1 else P_a)
    return -(flow + injection) / _column(model.load_damping, x.ndim)


def frequency_hz(model: GridModel, x: np.ndarray) -> np.ndarray:
    """Generator frequencies in Hz for one state or a trajectory."""
    x = np.asarray(x, dtype=float)
    return model.omega_nominal + model.to_hz(x[model.omega])
