"""
Receding-horizon resilient control loop over a staged attack.

At each stage boundary the cyber game is re-solved and the attack caps
become v = R̄·ρ. Inside a stage the defender (in min-max mode) solves the
capped physical game from the current state every step and applies its
first input; the attacker plays its stage policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from resilgrid.core.cyber_game.dto import CyberEquilibrium, CyberGameSpec, apply_overrides
from resilgrid.core.cyber_game.solver import nash_equilibrium
from resilgrid.core.epidemic.dto import (
    DegreeDistribution,
    EpidemicParams,
    EpidemicState,
    FleetParams,
)
from resilgrid.core.epidemic.model import (
    cyber_risk,
    default_time_step,
    integrate,
    scale_free_distribution,
    systemic_risk,
)
from resilgrid.core.exceptions import (
    InfeasibleAttackError,
    InputValidationError,
    SimulationAbortedError,
    SolverError,
)
from resilgrid.core.grid.discrete import step
from resilgrid.core.grid.dto import BusSystem, DiscreteGrid
from resilgrid.core.grid.model import frequency_hz, recover_phi
from resilgrid.core.physical_game.dto import GameWeights
from resilgrid.core.physical_game.riccati import riccati_check
from resilgrid.core.physical_game.solver import cost_reference, refine
from resilgrid.core.simulation.scenarios import (
    AttackScenario,
    DefenderMode,
    StrategicNE,
    check_policy,
    dynamic_attack_scenario,
)
from resilgrid.core.utils.logger import get_logger

logger = get_logger("simulation")

CAP_SOURCES = ("equilibrium", "transient")
DEFAULT_K_MAX = 100


@dataclass(frozen=True, eq=False)
class StepRecord:
    """State at t and the inputs applied over [t, t + T_s)."""

    t: float
    x: np.ndarray
    phi: np.ndarray
    Pd: np.ndarray
    Pa: np.ndarray
    freq_hz: np.ndarray
    trips: np.ndarray
    stage: int
    I_bar: float
    R_bar: float


@dataclass(frozen=True)
class StageSummary:
    index: int
    start: float
    duration: float
    equilibrium: CyberEquilibrium
    caps: Tuple[float, ...]


@dataclass(eq=False)
class SimulationLog:
    """Per-step records plus the cyber equilibrium of every stage."""

    scenario: str
    defender_mode: DefenderMode
    T_s: float
    generator_buses: List[int]
    load_buses: List[int]
    omega_nominal: float
    omega_max: float
    records: List[StepRecord] = field(default_factory=list)
    stages: List[StageSummary] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def _stack(self, attr: str) -> np.ndarray:
        return np.column_stack([getattr(r, attr) for r in self.records])

    def frequencies(self) -> np.ndarray:
        """Generator frequencies in Hz, one column per record."""
        return self._stack("freq_hz")

    def states(self) -> np.ndarray:
        return self._stack("x")

    def defense(self) -> np.ndarray:
        return self._stack("Pd")

    def attack(self) -> np.ndarray:
        return self._stack("Pa")

    def trip_flags(self) -> np.ndarray:
        return self._stack("trips")

    def stage_index(self) -> np.ndarray:
        return np.array([r.stage for r in self.records], dtype=int)


@dataclass(frozen=True, eq=False)
class _Plan:
    """Per-step stage data, fixed before the loop starts."""

    stage_of: np.ndarray
    elapsed: np.ndarray
    caps: np.ndarray
    I_bar: np.ndarray
    R_bar: np.ndarray
    stages: List[StageSummary]


def _solve_stages(
    system: BusSystem,
    scenario: AttackScenario,
    steps: Tuple[int, ...],
    T_s: float,
    cyber_spec: CyberGameSpec,
    fleet: FleetParams,
    cap_source: str,
    dist: Optional[DegreeDistribution],
    initial_infection: float,
) -> _Plan:
    total = sum(steps)
    n_v = system.n_v
    stage_of = np.empty(total + 1, dtype=int)
    elapsed = np.empty(total + 1)
    caps = np.empty((total + 1, n_v))
    I_bar = np.empty(total + 1)
    R_bar = np.empty(total + 1)
    summaries = []

    spec = cyber_spec
    state = None
    k = 0
    for s, (stage, n) in enumerate(zip(scenario.stages, steps)):
        if stage.cyber_overrides:
            spec = apply_overrides(spec, stage.cyber_overrides)
        eq = nash_equilibrium(spec, fleet=fleet)
        stage_caps = system.load_caps(eq.R_bar)
        logger.info("stage %d: NE (u_d=%.4f, u_a=%.4f), I=%.4f, R=%.2f p.u.",
                    s + 1, eq.u_d, eq.u_a, eq.I_bar, eq.R_bar)
        check_policy(stage.attack, stage_caps, s + 1, system.vulnerable_buses)
        summaries.append(StageSummary(s, k * T_s, stage.duration, eq,
                                      tuple(float(c) for c in stage_caps)))

        if cap_source == "transient":
            dist = dist or scale_free_distribution(spec.d_min, DEFAULT_K_MAX)
            params = EpidemicParams(gamma=spec.gamma_curve.value(eq.u_d),
                                    zeta=spec.zeta_curve.value(eq.u_a))
            if state is None:
                state = EpidemicState.uniform(dist, initial_infection)
            sub = max(1, math.ceil(T_s / default_time_step(params, dist)))
        for j in range(n + (1 if s == len(steps) - 1 else 0)):
            stage_of[k], elapsed[k] = s, j * T_s
            if cap_source == "transient":
                I_t = cyber_risk(state, dist)
                R_t = systemic_risk(I_t, fleet)
                I_bar[k], R_bar[k] = I_t, R_t
                caps[k] = system.load_caps(R_t)
                state = integrate(state, params, dist, T_s / sub, sub)
            else:
                I_bar[k], R_bar[k] = eq.I_bar, eq.R_bar
                caps[k] = stage_caps
            k += 1
    return _Plan(stage_of, elapsed, caps, I_bar, R_bar, summaries)


def _check_transient_caps(policy, elapsed: float, caps: np.ndarray, stage: int,
                          buses: List[int]) -> np.ndarray:
    demand = policy.demand(elapsed, caps)
    if demand is not None:
        over = np.flatnonzero(demand > caps)
        if over.size:
            i = int(over[0])
            raise InfeasibleAttackError(stage, buses[i], float(demand[i]), float(caps[i]))
    return demand


def run_scenario(
    system: BusSystem,
    grid: DiscreteGrid,
    weights: GameWeights,
    scenario: AttackScenario,
    x0: np.ndarray,
    cyber_spec: Optional[CyberGameSpec] = None,
    fleet: Optional[FleetParams] = None,
    start_step: int = 0,
    cap_source: str = "equilibrium",
    dist: Optional[DegreeDistribution] = None,
    initial_infection: float = 0.05,
) -> SimulationLog:
    """Simulate ``scenario`` and log one record per sampling instant.

    ``x0`` is the state at ``start_step``; resuming from a logged state
    reproduces the rest of the original run exactly.
    """
    if cap_source not in CAP_SOURCES:
        raise InputValidationError(f"cap_source must be one of {CAP_SOURCES}, got {cap_source!r}")
    cyber_spec = cyber_spec or CyberGameSpec()
    fleet = fleet or FleetParams()
    T_s = grid.T_s
    steps = scenario.stage_steps(T_s)
    total = sum(steps)
    if not 0 <= start_step <= total:
        raise InputValidationError(f"start_step must lie in [0, {total}], got {start_step}")

    minmax = scenario.defender_mode is DefenderMode.MINMAX
    needs_game = minmax or any(isinstance(s.attack, StrategicNE) for s in scenario.stages)
    certified = True
    if needs_game:
        report = riccati_check(grid, weights)
        if not report.certified:
            raise InputValidationError(
                "game weights fail the Riccati gate "
                f"(defender ok={report.defender_ok}, attacker ok={report.attacker_ok})"
            )
        certified = report.certified

    plan = _solve_stages(system, scenario, steps, T_s, cyber_spec, fleet,
                         cap_source, dist, initial_infection)
    model = grid.model
    x_ref = cost_reference(grid, weights)
    V = weights.attack_index
    limit = system.omega_max
    log = SimulationLog(
        scenario=scenario.name,
        defender_mode=scenario.defender_mode,
        T_s=T_s,
        generator_buses=system.generator_buses,
        load_buses=system.load_buses,
        omega_nominal=system.omega_nominal,
        omega_max=limit,
        stages=plan.stages,
    )
    tripped: Dict[int, float] = {}

    def record(k: int, x: np.ndarray, pd: np.ndarray, pa: np.ndarray) -> None:
        freq = frequency_hz(model, x)
        trips = np.abs(freq - system.omega_nominal) > limit
        for i in np.flatnonzero(trips):
            bus = system.generator_buses[i]
            if bus not in tripped:
                tripped[bus] = k * T_s
                logger.warning("generator at bus %d outside %.1f Hz band at t=%.1f s",
                               bus, limit, k * T_s)
        log.records.append(StepRecord(
            t=k * T_s,
            x=x,
            phi=recover_phi(model, x, P_a=pa),
            Pd=pd,
            Pa=pa,
            freq_hz=freq,
            trips=trips,
            stage=int(plan.stage_of[k]),
            I_bar=float(plan.I_bar[k]),
            R_bar=float(plan.R_bar[k]),
        ))

    x = np.array(x0, dtype=float)
    if x.shape != (grid.dim,):
        raise InputValidationError(f"x0 must have shape ({grid.dim},), got {x.shape}")
    stage_now = -1
    for k in range(start_step, total):
        s = int(plan.stage_of[k])
        if s != stage_now:
            stage_now = s
            logger.info("t=%.1f s: entering stage %d", k * T_s, s + 1)
        policy = scenario.stages[s].attack
        caps = plan.caps[k]
        pd = np.zeros(grid.n_g)
        if cap_source == "transient":
            pa_v = _check_transient_caps(policy, plan.elapsed[k], caps, s + 1,
                                         system.vulnerable_buses)
        else:
            pa_v = policy.demand(plan.elapsed[k], caps)
        if minmax or pa_v is None:
            try:
                sol = refine(grid, weights.with_caps(caps), x, x_ref=x_ref, certified=certified)
            except SolverError as exc:
                raise SimulationAbortedError(k, log, exc) from exc
            if minmax:
                pd = sol.Pd[:, 0].copy()
            if pa_v is None:
                pa_v = sol.Pa[V, 0].copy()
        pa = weights.expand(pa_v, grid.n_l)
        record(k, x, pd, pa)
        x = step(grid, x, pd, pa)

    record(total, x, np.zeros(grid.n_g), np.zeros(grid.n_l))
    logger.info("%s run finished: %d records, %d generator(s) tripped",
                scenario.name, len(log), len(tripped))
    return log


def run_dynamic_attack(
    system: BusSystem,
    grid: DiscreteGrid,
    weights: GameWeights,
    x0: np.ndarray,
    **kwargs,
) -> SimulationLog:
    """Three-stage botnet campaign under min-max defense."""
    return run_scenario(system, grid, weights, dynamic_attack_scenario(), x0, **kwargs)
