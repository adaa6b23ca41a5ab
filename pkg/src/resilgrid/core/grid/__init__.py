"""Linearized grid dynamics with PI-controlled generators and botnet-driven loads."""

from resilgrid.core.grid.case_io import (
    bundled_case_path,
    dump_case,
    load_bundled_case,
    load_case,
    parse_case,
)
from resilgrid.core.grid.discrete import discretize, operating_point, simulate, step
from resilgrid.core.grid.dto import (
    AdmittancePartition,
    Branch,
    BusSystem,
    DiscreteGrid,
    Generator,
    GridModel,
    Load,
)
from resilgrid.core.grid.model import (
    build_admittance,
    build_continuous,
    frequency_hz,
    recover_phi,
)

__all__ = [
    "AdmittancePartition",
    "Branch",
    "BusSystem",
    "DiscreteGrid",
    "Generator",
    "GridModel",
    "Load",
    "build_admittance",
    "build_continuous",
    "bundled_case_path",
    "discretize",
    "dump_case",
    "frequency_hz",
    "load_bundled_case",
    "load_case",
    "operating_point",
    "parse_case",
    "recover_phi",
    "simulate",
    "step",
]
