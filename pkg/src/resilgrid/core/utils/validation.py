"""Quick input guards for numerical parameters."""

from __future__ import annotations

import numpy as np

from resilgrid.core.exceptions import InputValidationError


def validate_positive(value: float, name: str) -> float:
    """Ensure a value is strictly positive."""
    if not value > 0:
        raise InputValidationError(f"{name} must be positive, got {value}")
    return value


def validate_psd(matrix: np.ndarray, name: str, tol: float = 1e-10) -> np.ndarray:
    """Ensure a symmetric matrix is positive semidefinite."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputValidationError(f"{name} must be square, got shape {m.shape}")
    if not np.allclose(m, m.T, atol=tol * max(1.0, float(np.abs(m).max(initial=0.0)))):
        raise InputValidationError(f"{name} must be symmetric")
    smallest = float(np.linalg.eigvalsh(m).min(initial=0.0)) if m.size else 0.0
    if smallest < -tol * max(1.0, float(np.abs(m).max(initial=0.0))):
        raise InputValidationError(
            f"{name} must be positive semidefinite (min eigenvalue {smallest:.3e})"
        )
    return m

