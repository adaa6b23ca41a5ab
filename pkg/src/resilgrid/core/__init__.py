"""Numerical core: epidemic, cyber game, grid model, physical game, simulation."""
