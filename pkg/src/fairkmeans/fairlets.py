"""Fairlet decomposition of an exactly balanced two-color point set.

A fairlet is a red/blue pairing carrying some integral weight. For unit
weights this is a min-cost perfect matching between the colors under the
edge cost ||r - b||^2 / 2 (the 1-means cost of clustering the pair on
its own); weighted inputs become a transport instance whose integral
flow may split a point's weight across several partners. The midpoint of
each matched pair serves as the fairlet's representative, and the total
matching cost is a lower bound on the optimal fair clustering cost for
every k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, pairwise_sq_dists
from .errors import BalanceError
from .transport import TransportProblem, solve_transport


@dataclass(frozen=True)
class Fairlet:
    """One matched red/blue arc with its paired weight."""

    red_index: int
    blue_index: int
    weight: int
    representative: np.ndarray
    internal_cost: float


@dataclass
class FairletDecomposition:
    """All fairlets of a dataset plus their weighted representatives."""

    fairlets: list[Fairlet]
    rep_coords: np.ndarray  # (m, d) representatives (uncolored)
    rep_weights: np.ndarray  # (m,) int64
    matching_cost: float

    @property
    def size(self) -> int:
        return len(self.fairlets)


def split_two_colors(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Indices of red (color 1) and blue (color 2) points; validates balance."""
    if dataset.n_colors != 2:
        raise BalanceError(
            f"fairlet machinery supports exactly two colors, got {dataset.n_colors}"
        )
    red = np.flatnonzero(dataset.colors == 1)
    blue = np.flatnonzero(dataset.colors == 2)
    wr = int(dataset.weights[red].sum())
    wb = int(dataset.weights[blue].sum())
    if wr != wb:
        raise BalanceError(f"color weights differ: {wr} (color 1) vs {wb} (color 2)")
    if wr == 0:
        raise BalanceError("dataset has no points of either color")
    return red, blue


def compute_fairlets(dataset: Dataset) -> FairletDecomposition:
    """Min-cost fairlet decomposition via integral transport.

    Blue points act as sources and red points as sinks, each with its
    weight; arc costs are half squared distances. Every positive flow
    arc becomes one fairlet.
    """
    red, blue = split_two_colors(dataset)
    costs = 0.5 * pairwise_sq_dists(dataset.coords[blue], dataset.coords[red])
    problem = TransportProblem(costs, dataset.weights[blue], dataset.weights[red])
    flow = solve_transport(problem)

    fairlets = []
    reps = np.empty((len(flow.src), dataset.d), dtype=np.float64)
    for t in range(len(flow.src)):
        b = int(blue[flow.src[t]])
        r = int(red[flow.dst[t]])
        w = int(flow.amount[t])
        rep = 0.5 * (dataset.coords[r] + dataset.coords[b])
        reps[t] = rep
        fairlets.append(
            Fairlet(r, b, w, rep, w * float(costs[flow.src[t], flow.dst[t]]))
        )
    total = float(sum(f.internal_cost for f in fairlets))
    return FairletDecomposition(fairlets, reps, flow.amount.copy(), total)


def fairlet_lower_bound(decomposition: FairletDecomposition) -> float:
    """The matching cost c(M), a lower bound on the optimal fair cost for any k.

    Any fair clustering pairs reds with blues inside clusters; clustering
    each such pair on its own centroid costs ||r-b||^2/2, and the
    min-cost pairing can only be cheaper.
    """
    return decomposition.matching_cost
