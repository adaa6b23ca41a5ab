"""Custom exceptions for the resilgrid core.

Every public exception descends from ``ResilGridError``, so callers can
catch the whole lot with a single ``except ResilGridError``.
"""

from __future__ import annotations

from typing import Any, Dict, Optional, Sequence


class ResilGridError(Exception):
    """Root exception for anything resilgrid raises."""


class InputValidationError(ResilGridError, ValueError):
    """Input parameters are out of range or nonsensical."""


class ConfigurationError(ResilGridError):
    """Scenario config or case file is malformed or inconsistent."""


class CaseFormatError(ConfigurationError):
    """A case file violates the documented schema."""

    def __init__(self, field: str, problem: str, line: Optional[int] = None) -> None:
        self.field = field
        self.problem = problem
        self.line = line
        where = f"line {line}, " if line is not None else ""
        super().__init__(f"{where}field '{field}': {problem}")


class DisconnectedGridError(ConfigurationError):
    """The branch graph splits the buses into several islands."""

    def __init__(self, components: Sequence[Sequence[int]]) -> None:
        self.components = [list(c) for c in components]
        sizes = ", ".join(str(len(c)) for c in self.components)
        super().__init__(
            f"branch graph is not connected: {len(self.components)} components "
            f"(sizes {sizes})"
        )


class InfeasibleAttackError(ConfigurationError):
    """An attack policy asks for more load than the stage cap allows."""

    def __init__(self, stage: int, bus: int, value: float, cap: float) -> None:
        self.stage = stage
        self.bus = bus
        self.value = value
        self.cap = cap
        super().__init__(
            f"stage {stage}: attack on bus {bus} requests {value:.4f} p.u. "
            f"above cap {cap:.4f} p.u."
        )


class PresetNotFoundError(ConfigurationError):
    """No preset registered under the requested name."""

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"Preset '{name}' is not registered.")


class SolverError(ResilGridError):
    """A numerical solver blew up or didn't converge."""


class ConvergenceError(SolverError):
    """An iterative solver hit its iteration cap."""

    def __init__(
        self,
        solver: str,
        iterations: int,
        residual: float,
        partial: Any = None,
    ) -> None:
        self.solver = solver
        self.iterations = iterations
        self.residual = residual
        self.partial = partial
        super().__init__(
            f"{solver}: no convergence after {iterations} iterations "
            f"(residual {residual:.3e})"
        )


class IntegrationInstabilityError(SolverError):
    """A fixed-step integrator left the invariant box [0, 1]."""

    def __init__(self, dt: float, value: float) -> None:
        self.dt = dt
        self.value = value
        super().__init__(
            f"integration left [0, 1] (value {value:.3e}) with dt={dt:.3e}; "
            "use a smaller dt"
        )


class SingularSweepError(SolverError):
    """The backward affine sweep met a singular matrix."""

    def __init__(self, step: int) -> None:
        self.step = step
        super().__init__(f"singular sweep matrix at step {step}")


class SimulationAbortedError(SolverError):
    """A scenario run stopped early; ``log`` holds the records so far."""

    def __init__(self, step: int, log: Any, cause: Exception) -> None:
        self.step = step
        self.log = log
        self.cause = cause
        super().__init__(f"simulation aborted at step {step}: {cause}")


class SafetyAssertionError(ResilGridError):
    """A run tripped generators while safety assertions were requested."""

    def __init__(self, trips: Dict[int, float]) -> None:
        self.trips = dict(trips)
        listing = ", ".join(f"G{g}@{t:.1f}s" for g, t in sorted(self.trips.items()))
        super().__init__(f"frequency relay trips: {listing}")
