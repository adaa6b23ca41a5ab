"""Static cyber defense game over protection and attack effort."""

from resilgrid.core.cyber_game.analysis import (
    epidemic_free_region,
    inflection_point,
    risk_bar,
    risk_partials,
    unique_br_condition,
)
from resilgrid.core.cyber_game.dto import (
    CostCurve,
    CurveKind,
    CyberEquilibrium,
    CyberGameSpec,
    EffortCurve,
    RiskPartials,
    apply_overrides,
)
from resilgrid.core.cyber_game.solver import (
    best_response_attacker,
    best_response_curve,
    best_response_defender,
    nash_equilibrium,
)

__all__ = [
    "CostCurve",
    "CurveKind",
    "CyberEquilibrium",
    "CyberGameSpec",
    "EffortCurve",
    "RiskPartials",
    "apply_overrides",
    "best_response_attacker",
    "best_response_curve",
    "best_response_defender",
    "epidemic_free_region",
    "inflection_point",
    "nash_equilibrium",
    "risk_bar",
    "risk_partials",
    "unique_br_condition",
]
