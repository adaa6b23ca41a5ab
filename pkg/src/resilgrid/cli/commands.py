"""CLI command handlers: epidemic sweeps, cyber equilibria, scenario runs, validation."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from resilgrid.cli.config import ScenarioConfig
from resilgrid.core.cyber_game.analysis import epidemic_free_region
from resilgrid.core.cyber_game.solver import best_response_curve, nash_equilibrium
from resilgrid.core.epidemic.dto import EpidemicParams, EpidemicState
from resilgrid.core.epidemic.model import (
    default_time_step,
    epidemic_threshold,
    integrate_trajectory,
    scale_free_distribution,
    steady_state,
    steady_state_continuum,
)
from resilgrid.core.exceptions import SafetyAssertionError, SimulationAbortedError
from resilgrid.core.grid.discrete import discretize, operating_point
from resilgrid.core.grid.dto import BusSystem, DiscreteGrid
from resilgrid.core.grid.model import build_continuous
from resilgrid.core.physical_game.riccati import riccati_check
from resilgrid.core.reports.report_generator import ValidationReport, gate_diagnostics
from resilgrid.core.reports.writers import write_csv, write_json
from resilgrid.core.simulation.engine import SimulationLog, run_scenario
from resilgrid.core.simulation.safety import check_safety
from resilgrid.core.utils.logger import get_logger

logger = get_logger("cli")


def _out_dir(config: ScenarioConfig, out: Optional[str]) -> Path:
    path = Path(out or config.output.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _wants(config: ScenarioConfig, fmt: str) -> bool:
    return fmt in config.output.formats


def cmd_epidemic(config: ScenarioConfig, out: Optional[str] = None, jobs: int = 1) -> List[Path]:
    """I(t) for every spreading rate in the sweep plus both steady-state estimates."""
    ep = config.epidemic
    dist = scale_free_distribution(ep.d_min, ep.k_max)
    directory = _out_dir(config, out)

    def one(zeta: float):
        params = EpidemicParams(gamma=ep.gamma, zeta=zeta)
        dt = ep.dt or default_time_step(params, dist)
        steps = int(round(ep.t_end / dt))
        state = EpidemicState.uniform(dist, ep.initial_infection)
        times, risks, _ = integrate_trajectory(state, params, dist, dt, steps, ep.record_every)
        _, discrete = steady_state(params, dist)
        _, continuum = steady_state_continuum(params, ep.d_min)
        return times, risks, discrete, continuum

    if jobs > 1 and len(ep.zetas) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, ep.zetas))
    else:
        results = [one(z) for z in ep.zetas]

    header = ["t"] + [f"I_zeta_{z:g}" for z in ep.zetas]
    rows: List[List[Any]] = []
    if results:
        times = results[0][0]
        rows = [[t] + [r[1][i] for r in results] for i, t in enumerate(times)]
    written = []
    if _wants(config, "csv"):
        written.append(write_csv(directory / "epidemic_timeseries.csv", header, rows))
        written.append(write_csv(
            directory / "steady_state.csv",
            ["zeta", "I_discrete", "I_continuum"],
            [[z, r[2], r[3]] for z, r in zip(ep.zetas, results)],
        ))
    return written


def cmd_cyber_ne(config: ScenarioConfig, out: Optional[str] = None, jobs: int = 1) -> List[Path]:
    """Best-response curves, the equilibrium and its convergence trace."""
    section = config.cyber_game
    spec = section.to_spec()
    directory = _out_dir(config, out)
    efforts = np.linspace(0.0, section.curve_max, section.curve_points)
    br_d = best_response_curve(spec, "defender", efforts, jobs=jobs)
    br_a = best_response_curve(spec, "attacker", efforts, jobs=jobs)
    eq = nash_equilibrium(spec, init=section.init, eps=section.eps,
                          max_iter=section.max_iter, fleet=config.fleet)
    logger.info("NE (u_d=%.6f, u_a=%.6f) I=%.6f R=%.3f p.u. in %d iterations",
                eq.u_d, eq.u_a, eq.I_bar, eq.R_bar, eq.iterations)

    written = []
    if _wants(config, "csv"):
        written.append(write_csv(
            directory / "best_response.csv",
            ["effort", "br_defender", "br_attacker"],
            zip(efforts, br_d, br_a),
        ))
        written.append(write_csv(
            directory / "nash_equilibrium.csv",
            ["u_d", "u_a", "I_bar", "R_bar", "iterations", "converged"],
            [[eq.u_d, eq.u_a, eq.I_bar, eq.R_bar, eq.iterations, eq.converged]],
        ))
        written.append(write_csv(
            directory / "ne_trace.csv",
            ["iteration", "max_change"],
            [[i + 1, d] for i, d in enumerate(eq.trace)],
        ))
    if _wants(config, "json"):
        written.append(write_json(directory / "summary.json", {
            "u_d": eq.u_d, "u_a": eq.u_a, "I_bar": eq.I_bar, "R_bar": eq.R_bar,
            "iterations": eq.iterations, "converged": eq.converged,
        }))
    return written


def build_grid(config: ScenarioConfig) -> tuple:
    """Case, continuous model and its sampled form."""
    system = config.grid.load()
    model = build_continuous(system)
    grid = discretize(model, config.grid.T_s, config.grid.method)
    return system, grid


def initial_state(config: ScenarioConfig, system: BusSystem, grid: DiscreteGrid) -> np.ndarray:
    """Operating point, optionally with random generator speed offsets."""
    x0 = operating_point(grid)
    init = config.scenario.initial
    if init.kind == "random_omega":
        rng = np.random.default_rng(init.seed)
        offsets = rng.uniform(-init.max_omega_hz, init.max_omega_hz, system.n_g)
        x0[grid.model.omega] += grid.model.from_hz(offsets)
    return x0


def _trajectory_rows(log: SimulationLog) -> tuple:
    header = (["t"]
              + [f"f_G{b}" for b in log.generator_buses]
              + [f"Pd_G{b}" for b in log.generator_buses]
              + [f"Pa_B{b}" for b in log.load_buses]
              + ["stage", "I_bar", "R_bar"])
    rows = [
        [r.t, *r.freq_hz, *r.Pd, *r.Pa, r.stage + 1, r.I_bar, r.R_bar]
        for r in log.records
    ]
    return header, rows


def run_summary(log: SimulationLog, aborted_at_step: Optional[int] = None) -> Dict[str, Any]:
    """Run metadata, safety figures and stage equilibria.

    ``aborted_at_step`` is None for a finished run; a log cut short
    before its first record has no safety section.
    """
    report = check_safety(log) if log.records else None
    return {
        "scenario": log.scenario,
        "defender_mode": log.defender_mode.value,
        "T_s": log.T_s,
        "records": len(log),
        "aborted_at_step": aborted_at_step,
        "safety": report.as_dict() if report else None,
        "trips": {str(k): v for k, v in report.first_trip.items()} if report else {},
        "stages": [
            {
                "index": s.index + 1,
                "start_s": s.start,
                "duration_s": s.duration,
                "u_d": s.equilibrium.u_d,
                "u_a": s.equilibrium.u_a,
                "I_bar": s.equilibrium.I_bar,
                "R_bar": s.equilibrium.R_bar,
                "caps": list(s.caps),
            }
            for s in log.stages
        ],
    }


def simulate_config(config: ScenarioConfig) -> SimulationLog:
    """Run the configured scenario from its initial state."""
    system, grid = build_grid(config)
    weights = config.weights.build(system)
    x0 = initial_state(config, system, grid)
    return run_scenario(
        system, grid, weights, config.scenario.to_scenario(), x0,
        cyber_spec=config.cyber_game.to_spec(),
        fleet=config.fleet,
        cap_source=config.scenario.cap_source,
        initial_infection=config.scenario.initial_infection,
    )


def cmd_run(
    config: ScenarioConfig,
    out: Optional[str] = None,
    assert_safe: bool = False,
) -> List[Path]:
    """Simulate the configured scenario and write trajectory and summary.

    A solver failure mid-run still writes the records logged so far,
    with ``aborted_at_step`` set in the summary, before re-raising.
    """
    directory = _out_dir(config, out)
    try:
        log = simulate_config(config)
    except SimulationAbortedError as exc:
        logger.error("run aborted at step %d; writing %d logged record(s)",
                     exc.step, len(exc.log))
        _write_run(config, directory, exc.log, aborted_at_step=exc.step)
        raise
    written = _write_run(config, directory, log)
    report = check_safety(log)
    if assert_safe and not report.safe:
        raise SafetyAssertionError(report.first_trip)
    return written


def _write_run(
    config: ScenarioConfig,
    directory: Path,
    log: SimulationLog,
    aborted_at_step: Optional[int] = None,
) -> List[Path]:
    written = []
    if _wants(config, "csv"):
        header, rows = _trajectory_rows(log)
        written.append(write_csv(directory / "trajectory.csv", header, rows))
    if _wants(config, "json"):
        written.append(write_json(directory / "summary.json",
                                  run_summary(log, aborted_at_step)))
    return written


def cmd_validate(config: ScenarioConfig) -> ValidationReport:
    """Grid facts, both Riccati gates and the cyber equilibrium; prints the report."""
    system, grid = build_grid(config)
    weights = config.weights.build(system)
    riccati = riccati_check(grid, weights)
    ep = config.epidemic
    dist = scale_free_distribution(ep.d_min, ep.k_max)
    section = config.cyber_game
    spec = section.to_spec()
    eq = nash_equilibrium(spec, init=section.init, eps=section.eps,
                          max_iter=section.max_iter, fleet=config.fleet)

    report = ValidationReport(
        title=config.scenario.name,
        gates=gate_diagnostics(riccati),
        equilibrium=eq,
        facts={
            "grid": {
                "case": system.name,
                "generators": system.n_g,
                "loads": system.n_l,
                "vulnerable buses": list(system.vulnerable_buses),
                "state dimension": grid.dim,
                "sampling time (s)": grid.T_s,
                "discretization": grid.method,
                "speed deviation unit": system.frequency_unit,
                "frequency limit (Hz)": system.omega_max,
            },
            "physical game": {
                "horizon": weights.horizon,
                "r_d": config.weights.r_d,
                "r_a": config.weights.r_a,
                "omega weight": config.weights.omega_weight,
                "cost reference": weights.cost_reference,
            },
            "epidemic": {
                "degree support": f"[{ep.d_min}, {ep.k_max}]",
                "threshold <k2>/<k>": epidemic_threshold(dist),
                "initial efforts epidemic-free": epidemic_free_region(spec, dist, *section.init),
                "fleet capacity (p.u.)": config.fleet.capacity_pu,
            },
        },
        notes=list(grid.model.notes),
    )
    print(report.render())
    return report
