"""
Structural analysis of the steady-state risk surface

    Ī(u_d, u_a) = exp(-γ(u_d) / (d_min ζ(u_a)))

Partial derivatives are analytic. The threshold region, the inflection
point in u_a and the unique-best-response test assume linear curves
where the closed forms need them.
"""

from __future__ import annotations

import math
from typing import Optional

from resilgrid.core.cyber_game.dto import CurveKind, CyberGameSpec, RiskPartials
from resilgrid.core.epidemic.dto import DegreeDistribution
from resilgrid.core.epidemic.model import epidemic_threshold
from resilgrid.core.exceptions import InputValidationError

BOUNDARY_RTOL = 1e-12


def _check_efforts(u_d: float, u_a: float) -> None:
    if u_d < 0 or u_a < 0:
        raise InputValidationError(f"efforts must be nonnegative, got u_d={u_d}, u_a={u_a}")


def risk_bar(spec: CyberGameSpec, u_d: float, u_a: float) -> float:
    """Steady-state cyber risk at the effort pair (u_d, u_a)."""
    _check_efforts(u_d, u_a)
    gamma = spec.gamma_curve.value(u_d)
    zeta = spec.zeta_curve.value(u_a)
    return math.exp(-gamma / (spec.d_min * zeta))


def risk_partials(spec: CyberGameSpec, u_d: float, u_a: float) -> RiskPartials:
    """Ī with first and second partials in each effort."""
    _check_efforts(u_d, u_a)
    d = spec.d_min
    g, g1, g2 = (f(u_d) for f in (spec.gamma_curve.value, spec.gamma_curve.d1,
                                   spec.gamma_curve.d2))
    z, z1, z2 = (f(u_a) for f in (spec.zeta_curve.value, spec.zeta_curve.d1,
                                   spec.zeta_curve.d2))
    I = math.exp(-g / (d * z))

    # u_d enters through q = γ/(dζ) with ζ fixed
    qd1 = g1 / (d * z)
    qd2 = g2 / (d * z)
    # u_a enters through q = γ/(dζ) with γ fixed
    qa1 = -g * z1 / (d * z * z)
    qa2 = -g * (z2 * z - 2.0 * z1 * z1) / (d * z ** 3)

    return RiskPartials(
        value=I,
        d_ud=-qd1 * I,
        d_ua=-qa1 * I,
        d_ud2=(qd1 * qd1 - qd2) * I,
        d_ua2=(qa1 * qa1 - qa2) * I,
    )


def epidemic_free_region(
    spec: CyberGameSpec, dist: DegreeDistribution, u_d: float, u_a: float
) -> bool:
    """True iff γ(u_d) >= (<k²>/<k>)·ζ(u_a); the boundary counts as free."""
    _check_efforts(u_d, u_a)
    gamma = spec.gamma_curve.value(u_d)
    bound = epidemic_threshold(dist) * spec.zeta_curve.value(u_a)
    return gamma >= bound * (1.0 - BOUNDARY_RTOL)


def _require_linear(spec: CyberGameSpec) -> None:
    if (spec.gamma_curve.kind is not CurveKind.LINEAR
            or spec.zeta_curve.kind is not CurveKind.LINEAR):
        raise InputValidationError("closed form requires linear γ and ζ curves")


def inflection_point(spec: CyberGameSpec, u_d: float) -> Optional[float]:
    """Attacker effort where ∂²Ī/∂u_a² turns from positive to negative.

    None when ζ(0) >= γ(u_d)/(2 d_min): Ī is then concave in u_a throughout.
    """
    _require_linear(spec)
    _check_efforts(u_d, 0.0)
    d = spec.d_min
    zeta0 = spec.zeta_curve.offset
    if zeta0 >= spec.gamma_curve.value(u_d) / (2.0 * d):
        return None
    k_d, gamma0 = spec.gamma_curve.slope, spec.gamma_curve.offset
    k_a = spec.zeta_curve.slope
    return (k_d * u_d + gamma0 - 2.0 * d * zeta0) / (2.0 * d * k_a)


def unique_br_condition(spec: CyberGameSpec) -> bool:
    """Sufficient test e^-1·k_a >= c_a for a unique attacker best response.

    Uses C_a = ½ c_a u², i.e. c_a is twice the quadratic coefficient.
    """
    _require_linear(spec)
    if spec.cost_a.linear != 0.0:
        raise InputValidationError("the closed-form test needs a purely quadratic C_a")
    c_a = 2.0 * spec.cost_a.quadratic
    return spec.zeta_curve.slope / math.e >= c_a * (1.0 - BOUNDARY_RTOL)
