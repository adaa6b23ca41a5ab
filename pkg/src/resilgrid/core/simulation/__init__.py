"""Receding-horizon resilient control under staged botnet attacks."""

from resilgrid.core.simulation.engine import (
    SimulationLog,
    StageSummary,
    StepRecord,
    run_dynamic_attack,
    run_scenario,
)
from resilgrid.core.simulation.safety import SafetyReport, check_safety
from resilgrid.core.simulation.scenarios import (
    AttackPolicy,
    AttackScenario,
    AttackStage,
    ConstantLoad,
    DefenderMode,
    LoadSwitch,
    NoAttack,
    StrategicNE,
    dynamic_attack_scenario,
    load_switch_scenario,
    no_attack_scenario,
    strategic_attack_scenario,
)

__all__ = [
    "AttackPolicy",
    "AttackScenario",
    "AttackStage",
    "ConstantLoad",
    "DefenderMode",
    "LoadSwitch",
    "NoAttack",
    "SafetyReport",
    "SimulationLog",
    "StageSummary",
    "StepRecord",
    "StrategicNE",
    "check_safety",
    "dynamic_attack_scenario",
    "load_switch_scenario",
    "no_attack_scenario",
    "run_dynamic_attack",
    "run_scenario",
    "strategic_attack_scenario",
]
