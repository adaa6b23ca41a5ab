"""Scenario preset registry.

The bundled case studies are auto-registered on first import.
Call ``get_preset('load-switch')`` to grab one. Short figure-style
aliases (``fig7a`` and friends) resolve to the same configs.
"""

from __future__ import annotations

import copy
from typing import Any, Dict, List

from resilgrid.core.exceptions import PresetNotFoundError

_PRESET_REGISTRY: Dict[str, Dict[str, Any]] = {}
_ALIASES: Dict[str, str] = {}


def register_preset(name: str, config: Dict[str, Any]) -> None:
    """Register a scenario config under ``name`` (replaces any earlier one)."""
    _ALIASES.pop(name, None)
    _PRESET_REGISTRY[name] = copy.deepcopy(config)


def register_alias(alias: str, name: str) -> None:
    """Make ``alias`` resolve to the registered preset ``name``."""
    if name not in _PRESET_REGISTRY:
        raise PresetNotFoundError(name)
    _ALIASES[alias] = name


def resolve_preset_name(name: str) -> str:
    """Canonical preset name behind ``name`` (itself if not an alias)."""
    return _ALIASES.get(name, name)


def get_preset(name: str) -> Dict[str, Any]:
    """Return a private copy of a registered preset or alias."""
    try:
        return copy.deepcopy(_PRESET_REGISTRY[resolve_preset_name(name)])
    except KeyError:
        raise PresetNotFoundError(name) from None


def list_presets() -> List[str]:
    """List all registered preset names (aliases excluded)."""
    return sorted(_PRESET_REGISTRY)


def list_aliases() -> Dict[str, str]:
    """Alias -> canonical preset name."""
    return dict(sorted(_ALIASES.items()))


def _auto_register() -> None:
    from . import case_studies

    for name, config in case_studies.PRESETS.items():
        register_preset(name, config)
    for alias, name in case_studies.ALIASES.items():
        register_alias(alias, name)


_auto_register()
