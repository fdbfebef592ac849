"""Integral min-cost bipartite transport and perfect matching.

This is the flow layer under fairlet decomposition, fair assignment, and
color-constrained costs. Instances are dense: every admissible
source/sink pair carries an arc. Two solve paths exist:

* ``ssp``: successive shortest augmenting paths with node potentials
  (deterministic, returns potentials certifying optimality);
* ``matching``: scipy's Jonker-Volgenant assignment solver, used
  automatically for square all-unit instances where it is much faster.

Both paths return the same optimal cost; they may differ in which
optimal support they pick.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._ssp import ssp_transport
from .errors import InfeasibleTransportError


@dataclass
class TransportProblem:
    """Dense bipartite transport instance.

    ``admissible`` masks arcs that may carry flow (default: all).
    Feasibility requires sum(supplies) == sum(demands).
    """

    costs: np.ndarray
    supplies: np.ndarray
    demands: np.ndarray
    admissible: np.ndarray | None = None

    def __post_init__(self):
        self.costs = np.ascontiguousarray(self.costs, dtype=np.float64)
        if self.costs.ndim != 2:
            raise ValueError("costs must be a 2-D matrix")
        self.supplies = np.asarray(self.supplies, dtype=np.int64)
        self.demands = np.asarray(self.demands, dtype=np.int64)
        ns, nt = self.costs.shape
        if self.supplies.shape != (ns,) or self.demands.shape != (nt,):
            raise ValueError("supplies/demands do not match the cost matrix shape")
        if len(self.supplies) and self.supplies.min() < 1:
            raise ValueError("supplies must be positive integers")
        if len(self.demands) and self.demands.min() < 1:
            raise ValueError("demands must be positive integers")
        if self.admissible is not None:
            self.admissible = np.ascontiguousarray(self.admissible, dtype=np.bool_)
            if self.admissible.shape != self.costs.shape:
                raise ValueError("admissible mask shape mismatch")
        mask = self.admissible if self.admissible is not None else np.ones_like(self.costs, bool)
        used = self.costs[mask]
        if used.size and (not np.all(np.isfinite(used)) or used.min() < 0):
            raise ValueError("arc costs must be finite and nonnegative on admissible arcs")


@dataclass
class FlowResult:
    """Sparse integral flow plus its cost and (optionally) dual potentials."""

    src: np.ndarray
    dst: np.ndarray
    amount: np.ndarray
    total_cost: float
    potentials: np.ndarray | None = None  # length ns+nt, sources first

    def flow_matrix(self, ns: int, nt: int) -> np.ndarray:
        M = np.zeros((ns, nt), dtype=np.int64)
        M[self.src, self.dst] = self.amount
        return M

    def verify_optimality(self, problem: TransportProblem, tol_factor: float = 1e-12) -> bool:
        """Complementary-slackness certificate from the node potentials.

        Every admissible arc must have nonnegative reduced cost and every
        flow-carrying arc zero reduced cost, up to a slack scaled by the
        largest arc cost.
        """
        if self.potentials is None:
            raise ValueError("no potentials recorded for this solve")
        ns, nt = problem.costs.shape
        pot_s = self.potentials[:ns]
        pot_t = self.potentials[ns:]
        red = problem.costs + pot_s[:, None] - pot_t[None, :]
        if problem.admissible is not None:
            red = np.where(problem.admissible, red, np.inf)
            used = problem.costs[problem.admissible]
        else:
            used = problem.costs
        scale = max(1.0, float(np.abs(used).max(initial=0.0)))
        tol = tol_factor * scale * max(ns + nt, 1)
        if red.min(initial=np.inf) < -tol:
            return False
        if len(self.src) and np.abs(red[self.src, self.dst]).max() > tol:
            return False
        return True


def solve_transport(problem: TransportProblem, method: str = "auto") -> FlowResult:
    """Minimum-cost integral flow saturating all supplies and demands.

    Raises InfeasibleTransportError when supplies and demands do not
    balance or the admissibility mask leaves no feasible flow.
    """
    ns, nt = problem.costs.shape
    if ns == 0 or nt == 0:
        raise InfeasibleTransportError("transport instance needs at least one source and sink")
    if problem.supplies.sum() != problem.demands.sum():
        raise InfeasibleTransportError(
            f"total supply {int(problem.supplies.sum())} != total demand "
            f"{int(problem.demands.sum())}"
        )
    if method not in ("auto", "ssp", "matching"):
        raise ValueError(f"unknown method {method!r}")

    unit_square = (
        ns == nt
        and problem.admissible is None
        and bool(np.all(problem.supplies == 1))
        and bool(np.all(problem.demands == 1))
    )
    if method == "matching" and not unit_square:
        raise ValueError("matching method requires a square all-unit instance")
    if method == "matching" or (method == "auto" and unit_square and ns > 8):
        rows, cols = linear_sum_assignment(problem.costs)
        cost = float(problem.costs[rows, cols].sum())
        return FlowResult(rows.astype(np.int64), cols.astype(np.int64),
                          np.ones(ns, dtype=np.int64), cost, None)

    mask = problem.admissible
    if mask is None:
        mask = np.ones((ns, nt), dtype=np.bool_)
    costs = np.where(mask, problem.costs, 0.0)  # masked entries never read, keep finite
    flow, pot, feasible = ssp_transport(costs, problem.supplies, problem.demands, mask)
    if not feasible:
        raise InfeasibleTransportError("admissibility mask admits no feasible flow")
    src, dst = np.nonzero(flow)
    amount = flow[src, dst]
    total = float(np.sum(problem.costs[src, dst] * amount))
    return FlowResult(src.astype(np.int64), dst.astype(np.int64), amount, total, pot)


def min_cost_perfect_matching(costs, method: str = "auto") -> tuple[np.ndarray, float]:
    """Min-cost perfect matching of a square cost table.

    Solved as unit-supply/unit-demand transport. Returns (perm, cost)
    where row i is matched to column perm[i].
    """
    costs = np.asarray(costs, dtype=np.float64)
    if costs.ndim != 2 or costs.shape[0] != costs.shape[1]:
        raise ValueError("matching needs a square cost table")
    n = costs.shape[0]
    problem = TransportProblem(costs, np.ones(n, np.int64), np.ones(n, np.int64))
    result = solve_transport(problem, method=method)
    perm = np.empty(n, dtype=np.int64)
    perm[result.src] = result.dst
    return perm, result.total_cost
