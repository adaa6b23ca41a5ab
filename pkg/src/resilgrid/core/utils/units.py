"""Unit conversion helpers.

Angles are in rad and power in p.u. on the system base. The generator
speed deviation ω is either in rad/s or in per unit of the nominal
frequency, as the case file declares. Reporting uses Hz.
"""

import math

FREQUENCY_UNITS = ("per_unit", "rad_per_second")


def hz_per_unit(unit: str, nominal_hz: float) -> float:
    """Hz represented by one unit of the speed-deviation state."""
    if unit == "per_unit":
        return float(nominal_hz)
    if unit == "rad_per_second":
        return 1.0 / (2.0 * math.pi)
    raise ValueError(f"frequency unit must be one of {FREQUENCY_UNITS}, got {unit!r}")
