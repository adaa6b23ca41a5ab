"""Finite-horizon open-loop min-max game between grid defender and botnet."""

from resilgrid.core.physical_game.dto import GameWeights, OpenLoopSolution, case_study_weights
from resilgrid.core.physical_game.riccati import (
    RiccatiReport,
    riccati_attacker,
    riccati_check,
    riccati_defender,
)
from resilgrid.core.physical_game.solver import (
    attacker_root,
    cost_reference,
    costates,
    feasible_start,
    objective,
    pmp_residual,
    refine,
    solve_barrier,
    solve_unconstrained,
)

__all__ = [
    "GameWeights",
    "OpenLoopSolution",
    "RiccatiReport",
    "attacker_root",
    "case_study_weights",
    "cost_reference",
    "costates",
    "feasible_start",
    "objective",
    "pmp_residual",
    "refine",
    "riccati_attacker",
    "riccati_check",
    "riccati_defender",
    "solve_barrier",
    "solve_unconstrained",
]
