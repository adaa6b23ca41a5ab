"""
Scenario config schema.

A config is a YAML mapping with the sections below; every section has
defaults, so a file (or preset) only spells out what it changes.
Unknown keys are rejected.
"""

from __future__ import annotations

import copy
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from resilgrid.core.cyber_game.dto import CyberGameSpec
from resilgrid.core.epidemic.dto import FleetParams
from resilgrid.core.exceptions import ConfigurationError
from resilgrid.core.grid.case_io import BUNDLED_CASES, bundled_case_path, load_case
from resilgrid.core.grid.dto import BusSystem
from resilgrid.core.physical_game.dto import GameWeights, case_study_weights
from resilgrid.core.presets import get_preset
from resilgrid.core.simulation.scenarios import (
    AttackPolicy,
    AttackScenario,
    AttackStage,
    ConstantLoad,
    DefenderMode,
    LoadSwitch,
    NoAttack,
    StrategicNE,
)


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class EpidemicSection(_Section):
    """SIS sweep behind ``resilgrid epidemic``."""

    d_min: int = Field(1, ge=1)
    k_max: int = Field(100, ge=1)
    gamma: float = Field(0.2, gt=0)
    zetas: List[float] = Field(default_factory=lambda: [0.2, 0.25, 0.3, 0.4, 0.5])
    initial_infection: float = Field(0.05, ge=0, le=1)
    t_end: float = Field(100.0, gt=0)
    dt: Optional[float] = Field(None, gt=0, description="RK4 step; derived from the rates if unset")
    record_every: int = Field(10, ge=1)

    @field_validator("zetas")
    @classmethod
    def _positive_rates(cls, v: List[float]) -> List[float]:
        if any(z <= 0 for z in v):
            raise ValueError("spreading rates must be positive")
        return v

    @model_validator(mode="after")
    def _support(self) -> EpidemicSection:
        if self.k_max < self.d_min:
            raise ValueError(f"k_max ({self.k_max}) must be at least d_min ({self.d_min})")
        return self


class CyberGameSection(CyberGameSpec):
    """Cyber game definition plus best-response iteration settings."""

    eps: float = Field(1e-8, gt=0)
    max_iter: int = Field(200, ge=1)
    init: Tuple[float, float] = (1.0, 1.0)
    curve_max: float = Field(3.0, gt=0, description="Upper end of the sampled BR curves")
    curve_points: int = Field(61, ge=2)

    def to_spec(self) -> CyberGameSpec:
        fields = set(CyberGameSpec.model_fields)
        return CyberGameSpec.model_validate(self.model_dump(include=fields))


class GridSection(_Section):
    case: str = Field("ieee39", description="Bundled case name or path to a .case file")
    T_s: float = Field(0.1, gt=0, description="Sampling time (s)")
    method: Literal["exact", "euler"] = "exact"

    @field_validator("case")
    @classmethod
    def _case_exists(cls, v: str) -> str:
        if v not in BUNDLED_CASES and not Path(v).exists():
            raise ValueError(f"case '{v}' is neither bundled nor an existing file")
        return v

    def load(self) -> BusSystem:
        path = bundled_case_path(self.case) if self.case in BUNDLED_CASES else Path(self.case)
        return load_case(path)


class WeightsSection(_Section):
    horizon: int = Field(20, ge=1)
    r_d: float = Field(0.2, gt=0)
    r_a: float = Field(0.05, gt=0)
    omega_weight: float = Field(5.0, ge=0)
    angle_weight: float = Field(1.0, ge=0)
    terminal_scale: float = Field(5.0, ge=0)
    mu0: float = Field(2.0, gt=0)
    alpha: float = Field(5.0, gt=1)
    n_max: int = Field(6, ge=1)
    cost_reference: Literal["origin", "operating_point"] = "origin"
    barrier_tol: float = Field(1e-8, gt=0, description="Absolute residual per barrier solve")
    barrier_max_iter: int = Field(200, ge=1)

    def build(self, system: BusSystem, caps: Optional[np.ndarray] = None) -> GameWeights:
        caps = np.zeros(system.n_v) if caps is None else caps
        return case_study_weights(
            system, caps,
            horizon=self.horizon, r_d=self.r_d, r_a=self.r_a,
            omega_weight=self.omega_weight, angle_weight=self.angle_weight,
            terminal_scale=self.terminal_scale,
            mu=self.mu0, alpha=self.alpha, n_max=self.n_max,
            cost_reference=self.cost_reference, barrier_tol=self.barrier_tol,
            barrier_max_iter=self.barrier_max_iter,
        )


class AttackSection(_Section):
    kind: Literal["none", "strategic", "constant", "switch"] = "none"
    values: Optional[List[float]] = None
    start: float = Field(0.0, ge=0)
    end: Optional[float] = None
    fraction: float = Field(0.9, ge=0, le=1)
    period: float = Field(50.0, gt=0)
    pattern: List[bool] = Field(default_factory=lambda: [True, False], min_length=1)

    @model_validator(mode="after")
    def _values_for_constant(self) -> AttackSection:
        if self.kind == "constant" and not self.values:
            raise ValueError("a constant attack needs 'values'")
        return self

    def to_policy(self) -> AttackPolicy:
        if self.kind == "strategic":
            return StrategicNE()
        if self.kind == "constant":
            end = float("inf") if self.end is None else self.end
            return ConstantLoad(values=tuple(self.values or ()), start=self.start, end=end)
        if self.kind == "switch":
            return LoadSwitch(fraction=self.fraction, period=self.period,
                              pattern=tuple(self.pattern))
        return NoAttack()


class StageSection(_Section):
    duration: float = Field(..., gt=0)
    attack: AttackSection = AttackSection()
    cyber_overrides: Dict[str, Any] = Field(default_factory=dict)


class InitialSection(_Section):
    kind: Literal["operating_point", "random_omega"] = "operating_point"
    max_omega_hz: float = Field(0.5, ge=0)
    seed: int = Field(0, ge=0)


class ScenarioSection(_Section):
    name: str = "scenario"
    defender_mode: DefenderMode = DefenderMode.MINMAX
    stages: List[StageSection] = Field(
        default_factory=lambda: [StageSection(duration=10.0)], min_length=1
    )
    initial: InitialSection = InitialSection()
    cap_source: Literal["equilibrium", "transient"] = "equilibrium"
    initial_infection: float = Field(0.05, ge=0, le=1)

    def to_scenario(self) -> AttackScenario:
        return AttackScenario(
            stages=tuple(
                AttackStage(s.duration, attack=s.attack.to_policy(),
                            cyber_overrides=copy.deepcopy(s.cyber_overrides))
                for s in self.stages
            ),
            defender_mode=self.defender_mode,
            name=self.name,
        )


class OutputSection(_Section):
    directory: str = "results"
    formats: List[Literal["csv", "json"]] = Field(default_factory=lambda: ["csv", "json"])


class ScenarioConfig(_Section):
    """Top-level scenario config."""

    epidemic: EpidemicSection = EpidemicSection()
    cyber_game: CyberGameSection = CyberGameSection()
    fleet: FleetParams = FleetParams()
    grid: GridSection = GridSection()
    weights: WeightsSection = WeightsSection()
    scenario: ScenarioSection = ScenarioSection()
    output: OutputSection = OutputSection()


def deep_merge(base: Mapping[str, Any], extra: Mapping[str, Any]) -> Dict[str, Any]:
    """Nested mappings merge key by key; anything else in ``extra`` wins."""
    out = copy.deepcopy(dict(base))
    for key, value in extra.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), Mapping):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def read_config_file(path: str) -> Dict[str, Any]:
    """Parse a YAML config file into a mapping."""
    p = Path(path)
    if not p.exists():
        raise ConfigurationError(f"config file '{path}' not found")
    try:
        raw = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1})" if mark is not None else ""
        raise ConfigurationError(f"'{path}' is not valid YAML{where}: {exc}") from exc
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigurationError(f"'{path}' does not contain a YAML mapping")
    return raw


def resolve_config(
    preset: Optional[str] = None,
    config_path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> ScenarioConfig:
    """Preset, then config file, then CLI overrides, validated as one document."""
    raw: Dict[str, Any] = get_preset(preset) if preset else {}
    if config_path:
        raw = deep_merge(raw, read_config_file(config_path))
    if overrides:
        raw = deep_merge(raw, overrides)
    return ScenarioConfig.model_validate(raw)
