"""
Power grid data: bus system description and the linear models built from it.

Angles are in rad and power in p.u. on the system MVA base. The speed
deviation ω is in rad/s or in per unit of the nominal frequency, as
``BusSystem.frequency_unit`` says; machine constants share that basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Generator(BaseModel):
    """Synchronous machine with a PI frequency controller."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    bus: int = Field(..., ge=1)
    inertia: float = Field(..., gt=0, description="M_i (p.u.·s²/rad)")
    damping: float = Field(..., gt=0, description="D^G_i (p.u.·s/rad)")
    kp: float = Field(..., gt=0, description="Proportional gain K^P_i")
    ki: float = Field(..., gt=0, description="Integral gain K^I_i")


class Load(BaseModel):
    """Frequency-sensitive load bus."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    bus: int = Field(..., ge=1)
    damping: float = Field(..., gt=0, description="D^L_i (p.u.·s/rad)")
    secure_load: float = Field(0.0, description="P^LS_i (p.u.)")


class Branch(BaseModel):
    """Lossless line in the DC approximation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    from_bus: int = Field(..., ge=1)
    to_bus: int = Field(..., ge=1)
    susceptance: float = Field(..., gt=0, description="B_ij (p.u.)")

    @model_validator(mode="after")
    def _no_self_loop(self) -> Branch:
        if self.from_bus == self.to_bus:
            raise ValueError(f"branch connects bus {self.from_bus} to itself")
        return self


class BusSystem(BaseModel):
    """Generators, loads, lines and the attack surface of one grid.

    ``rho`` maps each vulnerable load bus to its share of the botnet's
    controllable power; buses outside ``vulnerable_buses`` have share 0.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "grid"
    base_mva: float = Field(100.0, gt=0)
    generators: List[Generator] = Field(..., min_length=1)
    loads: List[Load] = Field(..., min_length=1)
    branches: List[Branch] = Field(..., min_length=1)
    vulnerable_buses: List[int] = Field(default_factory=list)
    rho: Dict[int, float] = Field(default_factory=dict)
    omega_nominal: float = Field(60.0, gt=0, description="Nominal frequency (Hz)")
    omega_max: float = Field(2.0, gt=0, description="Permissible deviation (Hz)")
    frequency_unit: Literal["per_unit", "rad_per_second"] = "rad_per_second"

    @field_validator("rho")
    @classmethod
    def _rho_nonnegative(cls, v: Dict[int, float]) -> Dict[int, float]:
        for bus, share in v.items():
            if share < 0:
                raise ValueError(f"rho[{bus}] must be nonnegative, got {share}")
        return v

    @model_validator(mode="after")
    def _check_topology(self) -> BusSystem:
        gen_ids = [g.bus for g in self.generators]
        load_ids = [ld.bus for ld in self.loads]
        all_ids = gen_ids + load_ids
        if len(set(all_ids)) != len(all_ids):
            raise ValueError("bus ids must be unique across generators and loads")
        known = set(all_ids)
        for br in self.branches:
            for end in (br.from_bus, br.to_bus):
                if end not in known:
                    raise ValueError(f"branch references unknown bus {end}")
        loads = set(load_ids)
        for bus in self.vulnerable_buses:
            if bus not in loads:
                raise ValueError(f"vulnerable bus {bus} is not a load bus")
        if len(set(self.vulnerable_buses)) != len(self.vulnerable_buses):
            raise ValueError("vulnerable_buses contains duplicates")
        outside = set(self.rho) - set(self.vulnerable_buses)
        if any(self.rho[b] != 0.0 for b in outside):
            raise ValueError(f"rho must be zero outside the vulnerable set, got {sorted(outside)}")
        if self.vulnerable_buses:
            total = sum(self.rho.get(b, 0.0) for b in self.vulnerable_buses)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"rho over vulnerable buses must sum to 1, got {total}")
        return self

    @property
    def n_g(self) -> int:
        return len(self.generators)

    @property
    def n_l(self) -> int:
        return len(self.loads)

    @property
    def n_v(self) -> int:
        return len(self.vulnerable_buses)

    @property
    def generator_buses(self) -> List[int]:
        return [g.bus for g in self.generators]

    @property
    def load_buses(self) -> List[int]:
        return [ld.bus for ld in self.loads]

    @property
    def vulnerable_index(self) -> np.ndarray:
        """Positions of the vulnerable buses within the load ordering."""
        order = {bus: i for i, bus in enumerate(self.load_buses)}
        return np.array([order[b] for b in self.vulnerable_buses], dtype=int)

    def rho_vector(self) -> np.ndarray:
        """ρ over the vulnerable buses, in ``vulnerable_buses`` order."""
        return np.array([self.rho.get(b, 0.0) for b in self.vulnerable_buses])

    def load_caps(self, r_bar: float) -> np.ndarray:
        """Per-bus attack caps v_i = R̄·ρ_i over the vulnerable buses."""
        return float(r_bar) * self.rho_vector()


@dataclass(frozen=True, eq=False)
class AdmittancePartition:
    """Susceptance Laplacian split by (generator, load) bus ordering."""

    GG: np.ndarray
    GL: np.ndarray
    LG: np.ndarray
    LL: np.ndarray

    @property
    def full(self) -> np.ndarray:
        return np.block([[self.GG, self.GL], [self.LG, self.LL]])


@dataclass(frozen=True, eq=False)
class GridModel:
    """Continuous dynamics ẋ = A x + B_d P^d + B_a P^a + c with x = (δ, θ, ω)."""

    A: np.ndarray
    B_d: np.ndarray
    B_a: np.ndarray
    c: np.ndarray
    n_g: int
    n_l: int
    admittance: AdmittancePartition
    load_damping: np.ndarray
    secure_load: np.ndarray
    omega_nominal: float = 60.0
    hz_per_unit: float = 1.0 / (2.0 * math.pi)
    notes: Tuple[str, ...] = field(default_factory=tuple)

    def to_hz(self, deviation: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Speed deviation in state units to Hz."""
        return deviation * self.hz_per_unit

    def from_hz(self, deviation_hz: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Speed deviation in Hz to state units."""
        return deviation_hz / self.hz_per_unit

    @property
    def dim(self) -> int:
        return 2 * self.n_g + self.n_l

    @property
    def delta(self) -> slice:
        return slice(0, self.n_g)

    @property
    def theta(self) -> slice:
        return slice(self.n_g, self.n_g + self.n_l)

    @property
    def omega(self) -> slice:
        return slice(self.n_g + self.n_l, self.dim)

    def index_map(self) -> Dict[str, slice]:
        return {"delta": self.delta, "theta": self.theta, "omega": self.omega}


@dataclass(frozen=True, eq=False)
class DiscreteGrid:
    """Sampled dynamics x_{t+1} = Ã x_t + B̃_d P^d_t + B̃_a P^a_t + c̃."""

    A: np.ndarray
    B_d: np.ndarray
    B_a: np.ndarray
    c: np.ndarray
    T_s: float
    method: str
    model: GridModel

    @property
    def dim(self) -> int:
        return self.model.dim

    @property
    def n_g(self) -> int:
        return self.model.n_g

    @property
    def n_l(self) -> int:
        return self.model.n_l
