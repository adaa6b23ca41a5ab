"""Frequency-safety summary of a simulation log."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from resilgrid.core.exceptions import InputValidationError
from resilgrid.core.simulation.engine import SimulationLog

SETTLE_BAND_HZ = 0.05


@dataclass(frozen=True)
class SafetyReport:
    """Per-generator peaks, first relay trips and settle times, keyed by bus."""

    peak_deviation: Dict[int, float]
    first_trip: Dict[int, float]
    settle_time: Dict[int, float]
    limit_hz: float
    settle_band_hz: float = SETTLE_BAND_HZ
    window: Optional[Tuple[float, float]] = field(default=None)

    @property
    def safe(self) -> bool:
        return not self.first_trip

    @property
    def max_peak(self) -> float:
        return max(self.peak_deviation.values(), default=0.0)

    def as_dict(self) -> dict:
        return {
            "safe": self.safe,
            "limit_hz": self.limit_hz,
            "settle_band_hz": self.settle_band_hz,
            "max_peak_hz": self.max_peak,
            "peak_deviation_hz": {str(k): v for k, v in self.peak_deviation.items()},
            "first_trip_s": {str(k): v for k, v in self.first_trip.items()},
            "settle_time_s": {str(k): v for k, v in self.settle_time.items()},
        }


def check_safety(
    log: SimulationLog,
    window: Optional[Tuple[float, float]] = None,
    settle_band_hz: float = SETTLE_BAND_HZ,
) -> SafetyReport:
    """Summarize |f - f_n| per generator over ``window`` (whole run by default).

    The settle time is the last instant the deviation exceeds the settle
    band, 0 if it never does.
    """
    if not log.records:
        raise InputValidationError("log has no records")
    times = log.times()
    dev = np.abs(log.frequencies() - log.omega_nominal)
    if window is not None:
        lo, hi = window
        if hi < lo:
            raise InputValidationError(f"window end {hi} precedes start {lo}")
        keep = (times >= lo) & (times <= hi)
        times, dev = times[keep], dev[:, keep]

    peaks, trips, settle = {}, {}, {}
    for i, bus in enumerate(log.generator_buses):
        row = dev[i]
        peaks[bus] = float(row.max(initial=0.0))
        over = np.flatnonzero(row > log.omega_max)
        if over.size:
            trips[bus] = float(times[over[0]])
        loose = np.flatnonzero(row > settle_band_hz)
        settle[bus] = float(times[loose[-1]]) if loose.size else 0.0
    return SafetyReport(
        peak_deviation=peaks,
        first_trip=trips,
        settle_time=settle,
        limit_hz=log.omega_max,
        settle_band_hz=settle_band_hz,
        window=window,
    )
