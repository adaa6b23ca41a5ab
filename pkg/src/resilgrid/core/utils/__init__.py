"""Shared utilities: logging, validation guards, unit conversion."""
