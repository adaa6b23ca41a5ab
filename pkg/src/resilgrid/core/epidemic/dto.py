"""
Epidemic inputs and state.

Rates in 1/s, power in watts unless noted. Degree-indexed arrays are
ordered by degree from ``d_min`` to ``k_max``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from resilgrid.core.exceptions import InputValidationError


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    """Finite-support node-degree law p(k) on [d_min, k_max]."""

    d_min: int
    k_max: int
    p: np.ndarray
    degrees: np.ndarray = field(init=False, repr=False)
    mean: float = field(init=False)
    second_moment: float = field(init=False)

    def __post_init__(self) -> None:
        if self.d_min < 1 or self.k_max < self.d_min:
            raise InputValidationError(
                f"degree support needs 1 <= d_min <= k_max, got [{self.d_min}, {self.k_max}]"
            )
        p = np.asarray(self.p, dtype=float)
        if p.shape != (self.k_max - self.d_min + 1,):
            raise InputValidationError(
                f"p must have {self.k_max - self.d_min + 1} entries, got {p.shape}"
            )
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise InputValidationError("p must be nonnegative and sum to 1")
        k = np.arange(self.d_min, self.k_max + 1, dtype=float)
        p.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "degrees", k)
        object.__setattr__(self, "mean", float(np.dot(k, p)))
        object.__setattr__(self, "second_moment", float(np.dot(k * k, p)))

    @property
    def size(self) -> int:
        return int(self.p.size)

    def probability(self, k: int) -> float:
        """p(k), zero outside the support."""
        if k < self.d_min or k > self.k_max:
            return 0.0
        return float(self.p[k - self.d_min])

    def as_dict(self) -> Dict[int, float]:
        return {int(k): float(pk) for k, pk in zip(self.degrees, self.p)}


class EpidemicParams(BaseModel):
    """Recovery rate γ and spreading rate ζ of the SIS process."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma: float = Field(..., gt=0, description="Recovery rate (1/s)")
    zeta: float = Field(..., gt=0, description="Spreading rate (1/s)")


@dataclass(frozen=True, eq=False)
class EpidemicState:
    """Per-degree infected densities I_k at time t."""

    t: float
    I: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.I, dtype=float)
        if values.ndim != 1:
            raise InputValidationError("I must be a 1-D array indexed by degree")
        if np.any(values < 0.0) or np.any(values > 1.0):
            raise InputValidationError("infected densities must lie in [0, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "I", values)

    @classmethod
    def uniform(cls, dist: DegreeDistribution, level: float, t: float = 0.0) -> EpidemicState:
        """Same infected density in every degree class."""
        return cls(t=t, I=np.full(dist.size, float(level)))


class FleetParams(BaseModel):
    """Size and wattage of the IoT-controlled high-power device fleet."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_devices: float = Field(1e7, gt=0, description="Device count N_d")
    device_watts: float = Field(5000.0, gt=0, description="Average device power W_d (W)")
    power_base: float = Field(1e8, gt=0, description="Watts per 1.0 p.u.")

    @property
    def capacity_pu(self) -> float:
        """Total controllable power N_d·W_d in p.u."""
        return self.n_devices * self.device_watts / self.power_base
