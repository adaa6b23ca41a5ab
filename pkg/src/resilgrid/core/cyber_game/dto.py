"""
Cyber defense game inputs and results.

Efforts u_d (defender) and u_a (attacker) are dimensionless. Effort curves
map effort to the recovery rate γ(u_d) and the spreading rate ζ(u_a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping

from pydantic import BaseModel, ConfigDict, Field, model_validator


class CurveKind(str, Enum):
    """Shapes of effort-response curves."""
    LINEAR = "linear"             # slope·u + offset
    SQRT_OFFSET = "sqrt_offset"   # √u + offset
    LOG_OFFSET = "log_offset"     # scale·log(u + 1) + offset


class EffortCurve(BaseModel):
    """Monotone, concave effort-response curve, positive at zero effort."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: CurveKind = CurveKind.LINEAR
    slope: float = Field(1.0, gt=0, description="k for linear curves")
    scale: float = Field(1.0, gt=0, description="Multiplier for log curves")
    offset: float = Field(0.1, gt=0, description="Value at zero effort")

    def value(self, u: float) -> float:
        if self.kind is CurveKind.LINEAR:
            return self.slope * u + self.offset
        if self.kind is CurveKind.SQRT_OFFSET:
            return math.sqrt(u) + self.offset
        return self.scale * math.log1p(u) + self.offset

    def d1(self, u: float) -> float:
        if self.kind is CurveKind.LINEAR:
            return self.slope
        if self.kind is CurveKind.SQRT_OFFSET:
            return math.inf if u <= 0.0 else 0.5 / math.sqrt(u)
        return self.scale / (1.0 + u)

    def d2(self, u: float) -> float:
        if self.kind is CurveKind.LINEAR:
            return 0.0
        if self.kind is CurveKind.SQRT_OFFSET:
            return -math.inf if u <= 0.0 else -0.25 * u ** -1.5
        return -self.scale / (1.0 + u) ** 2


class CostCurve(BaseModel):
    """Convex effort cost C(u) = linear·u + quadratic·u², with C(0) = 0."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    quadratic: float = Field(0.2, ge=0, description="Coefficient of u²")
    linear: float = Field(0.0, ge=0, description="Coefficient of u")

    def value(self, u: float) -> float:
        return self.linear * u + self.quadratic * u * u

    def d1(self, u: float) -> float:
        return self.linear + 2.0 * self.quadratic * u

    def d2(self, u: float) -> float:
        return 2.0 * self.quadratic


class CyberGameSpec(BaseModel):
    """Effort curves, costs and admissible sets of the cyber defense game."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma_curve: EffortCurve = EffortCurve(kind=CurveKind.SQRT_OFFSET, offset=0.1)
    zeta_curve: EffortCurve = EffortCurve(kind=CurveKind.LOG_OFFSET, scale=2.5, offset=0.1)
    cost_d: CostCurve = CostCurve(quadratic=0.2)
    cost_a: CostCurve = CostCurve(quadratic=0.2)
    d_min: int = Field(1, ge=1, description="Minimum node degree")
    u_max_d: float = Field(100.0, gt=0, description="Defender effort cap")
    u_max_a: float = Field(100.0, gt=0, description="Attacker effort cap")

    @model_validator(mode="after")
    def _check_cost_growth(self) -> CyberGameSpec:
        # a best response needs a cost that eventually dominates Ī ≤ 1
        for name, cost in (("cost_d", self.cost_d), ("cost_a", self.cost_a)):
            if cost.quadratic == 0.0 and cost.linear == 0.0:
                raise ValueError(f"{name} must not be identically zero")
        return self


def apply_overrides(spec: CyberGameSpec, overrides: Mapping[str, Any]) -> CyberGameSpec:
    """Return ``spec`` with nested fields replaced by ``overrides``."""
    merged = _deep_merge(spec.model_dump(mode="json"), dict(overrides))
    return CyberGameSpec.model_validate(merged)


def _deep_merge(base: Dict[str, Any], extra: Mapping[str, Any]) -> Dict[str, Any]:
    out = dict(base)
    for key, value in extra.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


@dataclass(frozen=True)
class RiskPartials:
    """Ī and its analytic partial derivatives at one effort pair."""
    value: float
    d_ud: float
    d_ua: float
    d_ud2: float
    d_ua2: float


@dataclass(frozen=True)
class CyberEquilibrium:
    """Result of the best-response iteration."""
    u_d: float
    u_a: float
    I_bar: float
    R_bar: float
    iterations: int
    converged: bool
    trace: List[float] = field(default_factory=list)
