"""Synthetic balanced two-color datasets for experiments and benchmarks."""

from __future__ import annotations

import numpy as np

from .core import Dataset
from .solver_utils import as_rng


def balanced_blobs(
    n: int,
    d: int = 2,
    n_blobs: int = 3,
    seed: int | None = 0,
    spread: float = 1.0,
    box: float = 10.0,
    color_shift: float = 0.0,
) -> Dataset:
    """Gaussian blobs with exactly balanced colors.

    Each blob gets an equal share of points, colors alternate within a
    blob so the dataset (and every blob) is exactly balanced. A positive
    ``color_shift`` displaces color 2 along the first axis, making
    fairness geometrically expensive (high fairlet cost), which mimics
    strongly gender-biased data.
    """
    if n % 2:
        raise ValueError("n must be even to balance two colors exactly")
    rng = as_rng(seed)
    centers = rng.uniform(-box, box, size=(n_blobs, d))
    sizes = np.full(n_blobs, n // n_blobs)
    sizes[: n - int(sizes.sum())] += 1
    coords = np.vstack(
        [rng.normal(scale=spread, size=(s, d)) + centers[i] for i, s in enumerate(sizes)]
    )
    colors = np.empty(n, dtype=np.int64)
    colors[0::2] = 1
    colors[1::2] = 2
    if color_shift:
        coords = coords.copy()
        coords[colors == 2, 0] += color_shift
    return Dataset(coords, colors, None, 2)


def two_group_blobs(
    n: int,
    d: int = 2,
    subblobs: int = 2,
    seed: int | None = 0,
    spread: float = 1.0,
    separation: float = 40.0,
    color_shift: float = 0.0,
) -> Dataset:
    """Balanced blobs arranged as two well-separated groups on axis 0.

    The 2-clustering structure is unambiguous (group split dominates any
    within-group regrouping), which makes cost ratios between pipelines
    measure summary fidelity rather than seeding luck.
    """
    if n % 2:
        raise ValueError("n must be even to balance two colors exactly")
    rng = as_rng(seed)
    blocks = []
    for sign in (-1.0, 1.0):
        centers = rng.normal(scale=2.0 * spread, size=(subblobs, d))
        centers[:, 0] += sign * separation / 2.0
        sizes = np.full(subblobs, (n // 2) // subblobs)
        sizes[: n // 2 - int(sizes.sum())] += 1
        blocks.extend(
            rng.normal(scale=spread, size=(s, d)) + centers[i]
            for i, s in enumerate(sizes)
        )
    coords = np.vstack(blocks)
    colors = np.empty(n, dtype=np.int64)
    colors[0::2] = 1
    colors[1::2] = 2
    if color_shift:
        coords[colors == 2, 0] += color_shift
    return Dataset(coords, colors, None, 2)


def stream_chunks(dataset: Dataset, chunk: int = 4096):
    """Yield (coords, colors, weights) chunks for streaming ingestion."""
    for start in range(0, dataset.n, chunk):
        stop = min(dataset.n, start + chunk)
        yield (
            dataset.coords[start:stop],
            dataset.colors[start:stop],
            dataset.weights[start:stop],
        )
