"""
Bundled case studies on the IEEE 39-bus system.

Each preset is a plain scenario config mapping; anything it leaves out
takes the schema default. Names say what the
preset runs.
"""

from __future__ import annotations

from typing import Any, Dict, List

# Fleet size at which the stage-1 equilibrium risk gives R̄ ≈ 166 p.u.
CALIBRATED_FLEET: Dict[str, Any] = {"n_devices": 5.94e6, "device_watts": 5000.0,
                                     "power_base": 1e8}
NOMINAL_FLEET: Dict[str, Any] = {"n_devices": 1e7, "device_watts": 5000.0,
                                 "power_base": 1e8}

# Per-bus manipulation (p.u.) of the constant-load attack, vulnerable-bus order
CONSTANT_ATTACK: List[float] = [10.4, 10.6, 9.9, 8.6, 9.5, 19.4, 9.5, 5.9]

BASE_CYBER_GAME: Dict[str, Any] = {
    "gamma_curve": {"kind": "sqrt_offset", "offset": 0.1},
    "zeta_curve": {"kind": "log_offset", "scale": 2.5, "offset": 0.1},
    "cost_d": {"quadratic": 0.2},
    "cost_a": {"quadratic": 0.2},
    "d_min": 1,
}

_GRID = {"case": "ieee39", "T_s": 0.1, "method": "exact"}
_WEIGHTS = {
    "horizon": 20,
    "r_d": 0.2,
    "r_a": 0.05,
    "omega_weight": 5.0,
    "terminal_scale": 5.0,
    "mu0": 2.0,
    "alpha": 5.0,
    "n_max": 6,
}
# Load steps of tens of p.u.: a frequency weight this heavy keeps them below 2 Hz
_HEAVY_LOAD_WEIGHTS = {**_WEIGHTS, "r_d": 0.005, "omega_weight": 1000.0}


def _case_study(
    name: str,
    mode: str,
    stages: List[Dict[str, Any]],
    weights: Dict[str, Any] = _WEIGHTS,
    **initial: Any,
) -> Dict[str, Any]:
    scenario: Dict[str, Any] = {"name": name, "defender_mode": mode, "stages": stages}
    if initial:
        scenario["initial"] = initial
    return {
        "cyber_game": dict(BASE_CYBER_GAME),
        "fleet": dict(CALIBRATED_FLEET),
        "grid": dict(_GRID),
        "weights": dict(weights),
        "scenario": scenario,
        "output": {"directory": f"results/{name}"},
    }


PRESETS: Dict[str, Dict[str, Any]] = {
    "epidemic-spread": {
        "epidemic": {
            "d_min": 1,
            "k_max": 100,
            "gamma": 0.2,
            "zetas": [0.2, 0.25, 0.3, 0.4, 0.5],
            "initial_infection": 0.05,
            "t_end": 100.0,
            "dt": 0.01,
            "record_every": 10,
        },
        "scenario": {"name": "epidemic-spread"},
        "output": {"directory": "results/epidemic-spread"},
    },
    "cyber-equilibrium": {
        "cyber_game": {**BASE_CYBER_GAME, "curve_max": 3.0, "curve_points": 61},
        "fleet": dict(NOMINAL_FLEET),
        "scenario": {"name": "cyber-equilibrium"},
        "output": {"directory": "results/cyber-equilibrium"},
    },
    # prohibitive linear costs: neither side moves
    "zero-effort": {
        "cyber_game": {
            "gamma_curve": {"kind": "linear", "slope": 1.0, "offset": 0.1},
            "zeta_curve": {"kind": "linear", "slope": 1.0, "offset": 0.1},
            "cost_d": {"quadratic": 0.2, "linear": 1e6},
            "cost_a": {"quadratic": 0.2, "linear": 1e6},
            "curve_max": 1.0,
            "curve_points": 11,
        },
        "scenario": {"name": "zero-effort"},
        "output": {"directory": "results/zero-effort"},
    },
    "no-attack": _case_study(
        "no-attack", "pi_only",
        [{"duration": 60.0, "attack": {"kind": "none"}}],
        kind="random_omega", max_omega_hz=0.5, seed=0,
    ),
    "load-switch": _case_study(
        "load-switch", "pi_only",
        [{"duration": 150.0, "attack": {"kind": "switch", "fraction": 0.9, "period": 50.0}}],
    ),
    "strategic-attack": _case_study(
        "strategic-attack", "minmax",
        [{"duration": 20.0, "attack": {"kind": "strategic"}},
         {"duration": 20.0, "attack": {"kind": "none"}}],
    ),
    "constant-attack": _case_study(
        "constant-attack", "minmax",
        [{"duration": 20.0, "attack": {"kind": "constant", "values": CONSTANT_ATTACK}},
         {"duration": 20.0, "attack": {"kind": "none"}}],
        weights=_HEAVY_LOAD_WEIGHTS,
    ),
    "dynamic-attack": _case_study(
        "dynamic-attack", "minmax",
        [{"duration": 10.0, "attack": {"kind": "strategic"}},
         {"duration": 10.0, "attack": {"kind": "switch", "fraction": 0.9, "period": 5.0},
          "cyber_overrides": {"zeta_curve": {"scale": 1.5}}},
         {"duration": 10.0, "attack": {"kind": "strategic"},
          "cyber_overrides": {"cost_d": {"quadratic": 0.3}}}],
        weights=_HEAVY_LOAD_WEIGHTS,
    ),
}

# Short aliases for the case studies above
ALIASES: Dict[str, str] = {
    "fig2": "epidemic-spread",
    "fig4": "cyber-equilibrium",
    "fig6a": "no-attack",
    "fig6b": "load-switch",
    "fig7a": "strategic-attack",
    "fig7b": "constant-attack",
    "fig8": "dynamic-attack",
}
