"""CSV ingestion: numeric features, a color column, optional balancing.

Preprocessing follows explicit, documented rules rather than guessing:
feature columns are the fully numeric columns (non-numeric columns are
dropped and reported, unless selected explicitly, which is an error);
rows with missing entries in used columns are dropped and counted; the
color column's distinct values map to labels 1..ell in sorted order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .core import Dataset
from .errors import DataFormatError
from .solver_utils import as_rng

NA_TOKENS = {"", "na", "n/a", "nan", "null", "none", "?"}


@dataclass
class IngestResult:
    dataset: Dataset
    feature_names: list[str]
    color_mapping: dict[str, int]
    n_rows_read: int
    n_rows_dropped: int
    dropped_columns: list[str] = field(default_factory=list)
    n_balanced_away: int = 0


def _is_missing(cell: str) -> bool:
    return cell.strip().lower() in NA_TOKENS


def _parse_float(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def ingest_csv(
    path,
    color_col: str,
    features: list[str] | None = None,
    balance: bool = False,
    seed: int = 0,
    max_rows: int | None = None,
) -> IngestResult:
    """Read a headered CSV into a unit-weight colored dataset.

    ``features``: explicit feature columns (non-numeric cells are then an
    error); default is every fully numeric column except the color
    column. ``balance`` subsamples the heavier of two colors uniformly
    without replacement (seeded) so both colors end up with equal
    weight.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file")
        header = [h.strip() for h in header]
        if color_col not in header:
            raise DataFormatError(f"{path}: color column {color_col!r} not in header {header}")
        rows = []
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataFormatError(
                    f"{path}: row with {len(row)} cells, header has {len(header)}"
                )
            rows.append(row)
            if max_rows is not None and len(rows) >= max_rows:
                break
    if not rows:
        raise DataFormatError(f"{path}: no data rows")

    color_idx = header.index(color_col)
    candidates = (
        features
        if features is not None
        else [h for h in header if h != color_col]
    )
    for name in candidates:
        if name not in header:
            raise DataFormatError(f"{path}: feature column {name!r} not in header")

    # classify candidate columns; only fully numeric ones survive unless
    # explicitly requested (then a bad cell is an error)
    feature_names: list[str] = []
    dropped_columns: list[str] = []
    for name in candidates:
        idx = header.index(name)
        numeric = True
        for row in rows:
            cell = row[idx]
            if _is_missing(cell):
                continue
            if _parse_float(cell) is None:
                numeric = False
                break
        if numeric:
            feature_names.append(name)
        elif features is not None:
            raise DataFormatError(f"{path}: column {name!r} has non-numeric cells")
        else:
            dropped_columns.append(name)
    if not feature_names:
        raise DataFormatError(f"{path}: no numeric feature columns")

    feat_idx = [header.index(name) for name in feature_names]
    coords_rows = []
    color_values = []
    n_dropped = 0
    for row in rows:
        used = [row[i] for i in feat_idx] + [row[color_idx]]
        if any(_is_missing(c) for c in used):
            n_dropped += 1
            continue
        coords_rows.append([float(row[i]) for i in feat_idx])
        color_values.append(row[color_idx].strip())
    if not coords_rows:
        raise DataFormatError(f"{path}: zero usable rows after dropping missing entries")

    distinct = sorted(set(color_values))
    mapping = {value: j + 1 for j, value in enumerate(distinct)}
    coords = np.asarray(coords_rows, dtype=np.float64)
    colors = np.array([mapping[v] for v in color_values], dtype=np.int64)

    n_balanced_away = 0
    if balance:
        if len(distinct) != 2:
            raise DataFormatError(
                f"{path}: balancing needs exactly two colors, got {len(distinct)}"
            )
        keep = balanced_subsample_indices(colors, as_rng(seed))
        n_balanced_away = len(colors) - len(keep)
        coords = coords[keep]
        colors = colors[keep]

    dataset = Dataset(coords, colors, None, len(distinct))
    return IngestResult(
        dataset, feature_names, mapping, len(rows), n_dropped, dropped_columns,
        n_balanced_away,
    )


def balanced_subsample_indices(colors: np.ndarray, rng) -> np.ndarray:
    """Indices equalizing two colors: the heavier color is subsampled
    uniformly without replacement; order is preserved."""
    idx1 = np.flatnonzero(colors == 1)
    idx2 = np.flatnonzero(colors == 2)
    target = min(len(idx1), len(idx2))
    keep1 = idx1 if len(idx1) == target else rng.choice(idx1, size=target, replace=False)
    keep2 = idx2 if len(idx2) == target else rng.choice(idx2, size=target, replace=False)
    return np.sort(np.concatenate([keep1, keep2]))


def write_dataset_csv(dataset: Dataset, path, feature_names: list[str] | None = None) -> None:
    """Write the normalized form: feature columns, then color, then weight."""
    names = feature_names or [f"x{j}" for j in range(dataset.d)]
    if len(names) != dataset.d:
        raise ValueError("feature name count does not match dimension")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(names) + ["color", "weight"])
        for i in range(dataset.n):
            writer.writerow(
                [repr(float(x)) for x in dataset.coords[i]]
                + [int(dataset.colors[i]), int(dataset.weights[i])]
            )
