"""Small shared helpers for the solver and coreset modules."""

from __future__ import annotations

import numpy as np


def as_rng(seed_or_rng=None) -> np.random.Generator:
    """Coerce None / int seed / Generator into a numpy Generator."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def weighted_centroids(coords, weights, labels, k: int) -> np.ndarray:
    """Per-label weighted centroid; rows of labels with no weight are NaN."""
    d = coords.shape[1]
    wf = weights.astype(np.float64)
    out = np.empty((k, d), dtype=np.float64)
    wtot = np.bincount(labels, weights=wf, minlength=k)
    for j in range(d):
        out[:, j] = np.bincount(labels, weights=coords[:, j] * wf, minlength=k)
    empty = wtot == 0
    out[~empty] /= wtot[~empty][:, None]
    out[empty] = np.nan
    return out
