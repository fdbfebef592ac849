"""Input validation helpers.

Every public entry point funnels raw user input (lists, arrays of any
dtype) through these checks so the numeric code can assume well-formed
float64/int64 arrays.
"""

from __future__ import annotations

import numpy as np


def check_coords(X, *, name: str = "coords") -> np.ndarray:
    """Validate a 2-D finite float coordinate array, returns float64 copy-if-needed."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {X.shape}")
    if X.shape[0] == 0:
        raise ValueError(f"{name} must contain at least one point")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    return X


def check_colors(colors, n: int, n_colors: int | None = None) -> tuple[np.ndarray, int]:
    """Validate color labels in {1..n_colors}; returns (int64 labels, n_colors)."""
    c = np.asarray(colors)
    if c.shape != (n,):
        raise ValueError(f"colors must have shape ({n},), got {c.shape}")
    if not np.issubdtype(c.dtype, np.integer):
        cf = np.asarray(colors, dtype=np.float64)
        if not np.all(cf == np.round(cf)):
            raise ValueError("colors must be integer labels")
        c = cf.astype(np.int64)
    c = c.astype(np.int64)
    if c.min() < 1:
        raise ValueError("color labels must be >= 1")
    inferred = int(c.max())
    if n_colors is None:
        n_colors = inferred
    elif inferred > n_colors:
        raise ValueError(f"color label {inferred} exceeds declared color count {n_colors}")
    return c, int(n_colors)


def check_weights(weights, n: int) -> np.ndarray:
    """Validate positive integer weights; fractional weights are rejected."""
    if weights is None:
        return np.ones(n, dtype=np.int64)
    w = np.asarray(weights)
    if w.shape != (n,):
        raise ValueError(f"weights must have shape ({n},), got {w.shape}")
    if not np.issubdtype(w.dtype, np.integer):
        wf = np.asarray(weights, dtype=np.float64)
        if not np.all(wf == np.round(wf)):
            raise ValueError("weights must be positive integers (fractional weights rejected)")
        w = wf.astype(np.int64)
    w = w.astype(np.int64)
    if w.min() < 1:
        raise ValueError("weights must be >= 1")
    return w


def check_centers(centers, d: int | None = None) -> np.ndarray:
    """Validate a nonempty (k, d) float64 center array."""
    C = np.asarray(centers, dtype=np.float64)
    if C.ndim == 1:
        C = C.reshape(1, -1) if d is None or C.shape[0] == d else C.reshape(-1, 1)
    if C.ndim != 2 or C.shape[0] == 0:
        raise ValueError("centers must be a nonempty 2-D array")
    if d is not None and C.shape[1] != d:
        raise ValueError(f"centers have dimension {C.shape[1]}, expected {d}")
    if not np.all(np.isfinite(C)):
        raise ValueError("centers contain non-finite values")
    return C
