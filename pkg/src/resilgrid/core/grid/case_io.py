"""
Case files: MATPOWER-style bus/branch/gen tables plus a control overlay.

A case is a YAML document::

    name: ieee39
    base_mva: 100
    frequency_hz: 60
    bus:    {columns: [bus_i, type, Pd], rows: [[1, 1, 0.0], ...]}
    branch: {columns: [fbus, tbus, r, x], rows: [...]}   # or a ``b`` column
    gen:    {columns: [bus, Pg], rows: [...]}
    overlay:
      basis: per_unit_frequency     # or rad_per_second
      inertia: {30: 42.0, ...}      # H in s (M = 2H), or M directly
      generator_damping: {...}
      kp: {...}
      ki: {...}
      load_damping: 10.0            # scalar or per-bus mapping
      vulnerable_buses: [...]
      rho: uniform                  # or per-bus mapping
      secure_load: bus_pd           # or per-bus mapping in p.u.
      omega_max_hz: 2.0

Buses listed in ``gen`` are generator buses; every other bus is a load
bus. Demand recorded on a generator bus is dropped with a warning.

On the ``per_unit_frequency`` basis the speed deviation is measured in
per unit of the nominal frequency and gains are used as printed; on
``rad_per_second`` every constant is taken in rad/s units.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Dict, List, Literal, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from resilgrid.core.exceptions import CaseFormatError
from resilgrid.core.grid.dto import Branch, BusSystem, Generator, Load
from resilgrid.core.utils.logger import get_logger

logger = get_logger("grid.case_io")

BUNDLED_CASES = ("ieee39",)


class _Table(BaseModel):
    model_config = ConfigDict(extra="forbid")

    columns: List[str] = Field(..., min_length=1)
    rows: List[List[float]] = Field(default_factory=list)

    def records(self, name: str, required: List[str]) -> List[Dict[str, float]]:
        missing = [c for c in required if c not in self.columns]
        if missing:
            raise CaseFormatError(f"{name}.columns", f"missing column(s) {missing}")
        out = []
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise CaseFormatError(
                    f"{name}.rows[{i}]",
                    f"has {len(row)} values for {len(self.columns)} columns",
                )
            out.append(dict(zip(self.columns, row)))
        return out


class _Overlay(BaseModel):
    model_config = ConfigDict(extra="forbid")

    basis: Literal["per_unit_frequency", "rad_per_second"] = "per_unit_frequency"
    inertia: Dict[int, float]
    generator_damping: Dict[int, float]
    kp: Dict[int, float]
    ki: Dict[int, float]
    load_damping: Union[float, Dict[int, float]]
    vulnerable_buses: List[int] = Field(default_factory=list)
    rho: Union[Literal["uniform"], Dict[int, float]] = "uniform"
    secure_load: Union[Literal["bus_pd"], Dict[int, float]] = "bus_pd"
    omega_max_hz: float = Field(2.0, gt=0)


class _CaseDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "grid"
    base_mva: float = Field(100.0, gt=0)
    frequency_hz: float = Field(60.0, gt=0)
    bus: _Table
    branch: _Table
    gen: _Table
    overlay: _Overlay


def _per_bus(table: Dict[int, float], bus: int, field: str) -> float:
    if bus not in table:
        raise CaseFormatError(f"overlay.{field}", f"no value for bus {bus}")
    return float(table[bus])


def _branch_susceptance(record: Dict[str, float], i: int) -> float:
    if "b" in record:
        value = record["b"]
        if value <= 0:
            raise CaseFormatError(f"branch.rows[{i}]", f"susceptance must be positive, got {value}")
        return value
    if "x" not in record:
        raise CaseFormatError("branch.columns", "needs an 'x' or a 'b' column")
    x = record["x"]
    if x <= 0:
        raise CaseFormatError(f"branch.rows[{i}]", f"reactance must be positive, got {x}")
    return 1.0 / x


def _build_system(doc: _CaseDocument) -> BusSystem:
    buses = doc.bus.records("bus", ["bus_i"])
    bus_ids = [int(r["bus_i"]) for r in buses]
    if len(set(bus_ids)) != len(bus_ids):
        raise CaseFormatError("bus.rows", "duplicate bus_i")
    known = set(bus_ids)
    demand = {int(r["bus_i"]): r.get("Pd", 0.0) for r in buses}

    gen_ids = []
    for i, r in enumerate(doc.gen.records("gen", ["bus"])):
        bus = int(r["bus"])
        if bus not in known:
            raise CaseFormatError(f"gen.rows[{i}]", f"references unknown bus {bus}")
        gen_ids.append(bus)

    branches = []
    for i, r in enumerate(doc.branch.records("branch", ["fbus", "tbus"])):
        a, b = int(r["fbus"]), int(r["tbus"])
        for end in (a, b):
            if end not in known:
                raise CaseFormatError(f"branch.rows[{i}]", f"references unknown bus {end}")
        branches.append(Branch(from_bus=a, to_bus=b, susceptance=_branch_susceptance(r, i)))

    ov = doc.overlay
    per_unit = ov.basis == "per_unit_frequency"
    generators = []
    for bus in gen_ids:
        inertia = _per_bus(ov.inertia, bus, "inertia")
        generators.append(Generator(
            bus=bus,
            inertia=2.0 * inertia if per_unit else inertia,
            damping=_per_bus(ov.generator_damping, bus, "generator_damping"),
            kp=_per_bus(ov.kp, bus, "kp"),
            ki=_per_bus(ov.ki, bus, "ki"),
        ))
        if demand.get(bus, 0.0) and ov.secure_load == "bus_pd":
            logger.warning("bus %d: %.1f MW of demand on a generator bus ignored",
                           bus, demand[bus])

    loads = []
    for bus in (b for b in bus_ids if b not in set(gen_ids)):
        if isinstance(ov.load_damping, dict):
            damping = _per_bus(ov.load_damping, bus, "load_damping")
        else:
            damping = float(ov.load_damping)
        if ov.secure_load == "bus_pd":
            p_ls = demand.get(bus, 0.0) / doc.base_mva
        else:
            p_ls = _per_bus(ov.secure_load, bus, "secure_load")
        loads.append(Load(bus=bus, damping=damping, secure_load=p_ls))

    vulnerable = list(ov.vulnerable_buses)
    if ov.rho == "uniform":
        rho = {b: 1.0 / len(vulnerable) for b in vulnerable} if vulnerable else {}
    else:
        rho = dict(ov.rho)

    return BusSystem(
        name=doc.name,
        base_mva=doc.base_mva,
        generators=generators,
        loads=loads,
        branches=branches,
        vulnerable_buses=vulnerable,
        rho=rho,
        omega_nominal=doc.frequency_hz,
        omega_max=ov.omega_max_hz,
        frequency_unit="per_unit" if per_unit else "rad_per_second",
    )


def _field_path(loc) -> str:
    return ".".join(str(part) for part in loc)


def parse_case(text: str) -> BusSystem:
    """Build a BusSystem from the text of a case file."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise CaseFormatError("<document>", str(getattr(exc, "problem", exc)), line) from exc
    if not isinstance(raw, dict):
        raise CaseFormatError("<document>", "case file must be a YAML mapping")
    try:
        doc = _CaseDocument.model_validate(raw)
        return _build_system(doc)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise CaseFormatError(_field_path(first["loc"]), first["msg"]) from exc


def load_case(path: Union[str, Path]) -> BusSystem:
    """Read a case file from disk."""
    path = Path(path)
    if not path.exists():
        raise CaseFormatError("<path>", f"case file '{path}' not found")
    system = parse_case(path.read_text())
    logger.debug("loaded case %s from %s", system.name, path)
    return system


def bundled_case_path(name: str = "ieee39") -> Path:
    """Filesystem path of a case shipped inside the package."""
    if name not in BUNDLED_CASES:
        raise CaseFormatError("<name>", f"no bundled case '{name}' (have {list(BUNDLED_CASES)})")
    return Path(str(resources.files("resilgrid.core.grid") / "data" / f"{name}.case"))


def load_bundled_case(name: str = "ieee39") -> BusSystem:
    return load_case(bundled_case_path(name))


def case_document(system: BusSystem) -> dict:
    """Serialize ``system`` on its own basis with explicit per-bus values."""
    gen_ids = system.generator_buses
    per_unit = system.frequency_unit == "per_unit"
    inertia_scale = 0.5 if per_unit else 1.0
    bus_rows = [[b, 2, 0.0] for b in gen_ids] + [
        [ld.bus, 1, ld.secure_load * system.base_mva] for ld in system.loads
    ]
    return {
        "name": system.name,
        "base_mva": system.base_mva,
        "frequency_hz": system.omega_nominal,
        "bus": {"columns": ["bus_i", "type", "Pd"], "rows": bus_rows},
        "branch": {
            "columns": ["fbus", "tbus", "b"],
            "rows": [[br.from_bus, br.to_bus, br.susceptance] for br in system.branches],
        },
        "gen": {"columns": ["bus"], "rows": [[b] for b in gen_ids]},
        "overlay": {
            "basis": "per_unit_frequency" if per_unit else "rad_per_second",
            "inertia": {g.bus: inertia_scale * g.inertia for g in system.generators},
            "generator_damping": {g.bus: g.damping for g in system.generators},
            "kp": {g.bus: g.kp for g in system.generators},
            "ki": {g.bus: g.ki for g in system.generators},
            "load_damping": {ld.bus: ld.damping for ld in system.loads},
            "vulnerable_buses": list(system.vulnerable_buses),
            "rho": {b: system.rho.get(b, 0.0) for b in system.vulnerable_buses},
            "secure_load": {ld.bus: ld.secure_load for ld in system.loads},
            "omega_max_hz": system.omega_max,
        },
    }


def dump_case(system: BusSystem, path: Union[str, Path]) -> Path:
    """Write ``system`` so that ``load_case`` gives it back unchanged."""
    path = Path(path)
    path.write_text(yaml.safe_dump(case_document(system), sort_keys=False))
    return path
