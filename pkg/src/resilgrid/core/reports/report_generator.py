"""
Diagnostics behind ``resilgrid validate``.

A ``ValidationReport`` holds the Riccati gate outcome of both players,
the cyber equilibrium the configured game settles on and a few grid and
epidemic facts. ``render`` lays them out as plain text whose last line
is ``ok`` or ``FAILED``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from resilgrid.core.cyber_game.dto import CyberEquilibrium
from resilgrid.core.physical_game.riccati import RiccatiReport

KEY_WIDTH = 32


def failing_step(S: np.ndarray) -> Optional[int]:
    """Step at which a Riccati recursion stopped, None if it reached t = 0.

    The recursion fills S[T], S[T-1], ... and leaves NaN from the step
    whose gate failed downwards.
    """
    for t in range(S.shape[0]):
        if np.all(np.isfinite(S[t])):
            return None if t == 0 else t - 1
    return S.shape[0] - 1


@dataclass(frozen=True)
class GateDiagnostics:
    """One player's concavity/convexity gate."""

    player: str
    ok: bool
    min_eig: float
    failed_at: Optional[int] = None

    def describe(self) -> str:
        status = "ok" if self.ok else "FAILED"
        text = f"{status:<7s} min eigenvalue {self.min_eig:+.4e}"
        if self.failed_at is not None:
            text += f" (fails at t={self.failed_at})"
        return text


def gate_diagnostics(report: RiccatiReport) -> List[GateDiagnostics]:
    return [
        GateDiagnostics("defender", report.defender_ok, report.min_eig_d,
                        failing_step(report.S_d)),
        GateDiagnostics("attacker", report.attacker_ok, report.min_eig_a,
                        failing_step(report.S_a)),
    ]


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "yes" if value else "no"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    if isinstance(value, (list, tuple)):
        return ", ".join(_cell(v) for v in value) or "(none)"
    return str(value)


@dataclass
class ValidationReport:
    """Everything ``validate`` checks about one resolved config."""

    title: str
    gates: List[GateDiagnostics]
    equilibrium: Optional[CyberEquilibrium] = None
    facts: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def errors(self) -> List[str]:
        out = [f"{g.player} Riccati gate fails (min eigenvalue {g.min_eig:.3e})"
               for g in self.gates if not g.ok]
        eq = self.equilibrium
        if eq is not None and not eq.converged:
            out.append(f"cyber best-response iteration stopped after {eq.iterations} "
                       f"steps without converging")
        return out

    @property
    def ok(self) -> bool:
        return not self.errors

    def gate(self, player: str) -> GateDiagnostics:
        return next(g for g in self.gates if g.player == player)

    def render(self) -> str:
        lines = [f"resilgrid validate: {self.title}", ""]
        for heading, items in self.facts.items():
            lines.append(f"[{heading}]")
            lines.extend(f"  {key:<{KEY_WIDTH}s} {_cell(value)}" for key, value in items.items())
            lines.append("")

        lines.append("[riccati gates]")
        for g in self.gates:
            lines.append(f"  {g.player + ' Riccati':<{KEY_WIDTH}s} {g.describe()}")
        lines.append("")

        eq = self.equilibrium
        if eq is not None:
            lines.append("[cyber equilibrium]")
            rows = {
                "u_d": eq.u_d, "u_a": eq.u_a, "I_bar": eq.I_bar, "R_bar (p.u.)": eq.R_bar,
                "iterations": eq.iterations, "converged": eq.converged,
            }
            lines.extend(f"  {key:<{KEY_WIDTH}s} {_cell(value)}" for key, value in rows.items())
            lines.append("")

        for heading, marker, entries in (("notes", "!", self.notes),
                                         ("errors", "X", self.errors)):
            if entries:
                lines.append(f"[{heading}]")
                lines.extend(f"  {marker} {entry}" for entry in entries)
                lines.append("")

        lines.append("ok" if self.ok else "FAILED")
        return "\n".join(lines)
