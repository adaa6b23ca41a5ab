"""Degree-based mean-field SIS model of botnet propagation."""

from resilgrid.core.epidemic.dto import (
    DegreeDistribution,
    EpidemicParams,
    EpidemicState,
    FleetParams,
)
from resilgrid.core.epidemic.model import (
    cyber_risk,
    default_time_step,
    epidemic_threshold,
    integrate,
    integrate_trajectory,
    scale_free_distribution,
    steady_state,
    steady_state_continuum,
    steady_state_densities,
    systemic_risk,
    theta,
)

__all__ = [
    "DegreeDistribution",
    "EpidemicParams",
    "EpidemicState",
    "FleetParams",
    "cyber_risk",
    "default_time_step",
    "epidemic_threshold",
    "integrate",
    "integrate_trajectory",
    "scale_free_distribution",
    "steady_state",
    "steady_state_continuum",
    "steady_state_densities",
    "systemic_risk",
    "theta",
]
