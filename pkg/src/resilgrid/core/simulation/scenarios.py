"""
Attack policies and staged attack scenarios.

Policies emit a load manipulation per vulnerable bus. ``StrategicNE``
delegates to the physical game, which the engine solves every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from resilgrid.core.exceptions import InfeasibleAttackError, InputValidationError


class DefenderMode(str, Enum):
    """Who counters the attack besides the generators' own PI loops."""
    PI_ONLY = "pi_only"
    MINMAX = "minmax"


@dataclass(frozen=True)
class NoAttack:
    kind: str = field(default="none", init=False)

    def demand(self, elapsed: float, caps: np.ndarray) -> Optional[np.ndarray]:
        return np.zeros_like(caps)


@dataclass(frozen=True)
class StrategicNE:
    """Attacker replays the first move of its open-loop equilibrium."""
    kind: str = field(default="strategic", init=False)

    def demand(self, elapsed: float, caps: np.ndarray) -> Optional[np.ndarray]:
        return None


@dataclass(frozen=True)
class ConstantLoad:
    """Fixed manipulation per vulnerable bus, active on ``[start, end)`` of the stage."""
    values: Tuple[float, ...]
    start: float = 0.0
    end: float = math.inf
    kind: str = field(default="constant", init=False)

    def demand(self, elapsed: float, caps: np.ndarray) -> Optional[np.ndarray]:
        values = np.asarray(self.values, dtype=float)
        if values.shape != caps.shape:
            raise InputValidationError(
                f"constant load has {values.size} entries for {caps.size} vulnerable buses"
            )
        if self.start <= elapsed < self.end:
            return values
        return np.zeros_like(caps)


@dataclass(frozen=True)
class LoadSwitch:
    """Switch ``fraction``·v_i on every vulnerable bus, cycling ``pattern`` each ``period`` s."""
    fraction: float = 0.9
    period: float = 50.0
    pattern: Tuple[bool, ...] = (True, False)
    kind: str = field(default="switch", init=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.fraction <= 1.0:
            raise InputValidationError(f"fraction must lie in [0, 1], got {self.fraction}")
        if not self.period > 0:
            raise InputValidationError(f"period must be positive, got {self.period}")
        if not self.pattern:
            raise InputValidationError("pattern must not be empty")

    def demand(self, elapsed: float, caps: np.ndarray) -> Optional[np.ndarray]:
        slot = int(math.floor(elapsed / self.period + 1e-9)) % len(self.pattern)
        return self.fraction * caps if self.pattern[slot] else np.zeros_like(caps)


AttackPolicy = Union[NoAttack, StrategicNE, ConstantLoad, LoadSwitch]


def check_policy(policy: AttackPolicy, caps: np.ndarray, stage: int, buses: Sequence[int]) -> None:
    """Reject scripted policies that could exceed the stage caps."""
    if isinstance(policy, ConstantLoad):
        values = np.asarray(policy.values, dtype=float)
        if values.shape != caps.shape:
            raise InputValidationError(
                f"stage {stage}: constant load has {values.size} entries for {caps.size} buses"
            )
        over = np.flatnonzero(values > caps)
        if over.size:
            i = int(over[0])
            raise InfeasibleAttackError(stage, int(buses[i]), float(values[i]), float(caps[i]))


@dataclass(frozen=True)
class AttackStage:
    """One scripted stretch of the attack.

    ``cyber_overrides`` patch the cyber game of the previous stage, so
    changes accumulate from stage to stage.
    """
    duration: float
    attack: AttackPolicy = field(default_factory=NoAttack)
    cyber_overrides: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise InputValidationError(f"stage duration must be positive, got {self.duration}")


@dataclass(frozen=True)
class AttackScenario:
    stages: Tuple[AttackStage, ...]
    defender_mode: DefenderMode = DefenderMode.MINMAX
    name: str = "scenario"

    def __post_init__(self) -> None:
        if not self.stages:
            raise InputValidationError("a scenario needs at least one stage")

    @property
    def duration(self) -> float:
        return float(sum(s.duration for s in self.stages))

    def stage_steps(self, T_s: float) -> Tuple[int, ...]:
        """Steps per stage; every duration must be a multiple of T_s."""
        steps = []
        for i, stage in enumerate(self.stages):
            n = stage.duration / T_s
            if abs(n - round(n)) > 1e-9 * max(1.0, n):
                raise InputValidationError(
                    f"stage {i} duration {stage.duration} s is not a multiple of T_s={T_s}"
                )
            steps.append(int(round(n)))
        return tuple(steps)


def no_attack_scenario(
    duration: float = 60.0, mode: DefenderMode = DefenderMode.PI_ONLY
) -> AttackScenario:
    return AttackScenario(stages=(AttackStage(duration),), defender_mode=mode, name="no-attack")


def load_switch_scenario(
    duration: float = 150.0,
    period: float = 50.0,
    fraction: float = 0.9,
    mode: DefenderMode = DefenderMode.PI_ONLY,
) -> AttackScenario:
    """Vulnerable loads switched on for ``period`` s, off for ``period`` s, and so on."""
    stage = AttackStage(duration, attack=LoadSwitch(fraction=fraction, period=period))
    return AttackScenario(stages=(stage,), defender_mode=mode, name="load-switch")


def strategic_attack_scenario(
    attack: Optional[AttackPolicy] = None,
    attack_duration: float = 20.0,
    rest_duration: float = 20.0,
    mode: DefenderMode = DefenderMode.MINMAX,
) -> AttackScenario:
    """An attack followed by a quiet stretch with unchanged caps."""
    stages = [AttackStage(attack_duration, attack=attack or StrategicNE())]
    if rest_duration > 0:
        stages.append(AttackStage(rest_duration, attack=NoAttack()))
    return AttackScenario(stages=tuple(stages), defender_mode=mode, name="strategic")


def dynamic_attack_scenario(
    stage_duration: float = 10.0,
    switch_period: float = 5.0,
    mode: DefenderMode = DefenderMode.MINMAX,
) -> AttackScenario:
    """Three-stage botnet campaign.

    Stage 2 weakens the malware spreading, stage 3 additionally makes
    protection dearer; the load attack alternates between the game
    strategy and a load switch.
    """
    return AttackScenario(
        stages=(
            AttackStage(stage_duration, attack=StrategicNE()),
            AttackStage(stage_duration, attack=LoadSwitch(fraction=0.9, period=switch_period),
                        cyber_overrides={"zeta_curve": {"scale": 1.5}}),
            AttackStage(stage_duration, attack=StrategicNE(),
                        cyber_overrides={"cost_d": {"quadratic": 0.3}}),
        ),
        defender_mode=mode,
        name="dynamic",
    )
