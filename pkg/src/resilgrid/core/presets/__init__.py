"""Bundled scenario presets."""

from resilgrid.core.presets.registry import (
    get_preset,
    list_aliases,
    list_presets,
    register_alias,
    register_preset,
    resolve_preset_name,
)

__all__ = [
    "get_preset",
    "list_aliases",
    "list_presets",
    "register_alias",
    "register_preset",
    "resolve_preset_name",
]
