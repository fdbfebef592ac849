"""Scikit-learn style estimator for fair k-means.

``FairKMeans`` follows the familiar fit/predict contract so the solvers
compose with pipelines, grid search, and the rest of the ecosystem. The
sensitive attribute is the ``y`` argument of ``fit`` (integer color
labels); sample weights are positive integers.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .core import Dataset, nearest_center
from .coreset import build_fair_coreset
from .assignment import fair_assignment
from .solvers import SolverConfig, cklv_kmeanspp, fair_kmeanspp, ptas, reassigned_cklv
from .validation import check_colors, check_coords, check_weights

_ALGORITHMS = ("cklv", "reassigned", "fair", "ptas")


class FairKMeans(ClusterMixin, BaseEstimator):
    """Exactly balanced two-color k-means clustering.

    Parameters
    ----------
    n_clusters : number of centers.
    algo : one of "cklv", "reassigned", "fair", "ptas".
    max_iter, tol : stopping rule of the Lloyd-style refinements.
    random_state : seed for all internal randomness.
    use_coreset : summarize the input first and solve on the summary;
        centers are then re-evaluated by a fair assignment on the full
        input.
    coreset_epsilon, coreset_size : summary accuracy / size target.
    ptas_epsilon : approximation parameter when algo="ptas".

    Attributes
    ----------
    cluster_centers_ : (n_clusters, d) array.
    labels_ : per-point cluster of the fair assignment (majority center
        for weight-split points).
    inertia_ : fair assignment cost of the training data.
    """

    def __init__(
        self,
        n_clusters: int = 2,
        algo: str = "reassigned",
        max_iter: int = 100,
        tol: float = 1e-6,
        random_state: int | None = None,
        use_coreset: bool = False,
        coreset_epsilon: float = 0.2,
        coreset_size: int | None = None,
        ptas_epsilon: float = 1.0,
    ):
        self.n_clusters = n_clusters
        self.algo = algo
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state
        self.use_coreset = use_coreset
        self.coreset_epsilon = coreset_epsilon
        self.coreset_size = coreset_size
        self.ptas_epsilon = ptas_epsilon

    def _solve(self, dataset: Dataset):
        config = SolverConfig(
            k=self.n_clusters,
            max_iter=self.max_iter,
            tol=self.tol,
            seed=self.random_state,
        )
        if self.algo == "cklv":
            return cklv_kmeanspp(dataset, config)
        if self.algo == "reassigned":
            return reassigned_cklv(dataset, config)
        if self.algo == "fair":
            return fair_kmeanspp(dataset, config)
        if self.algo == "ptas":
            return ptas(
                dataset, self.n_clusters, self.ptas_epsilon,
                mode="auto", rng=self.random_state,
            )
        raise ValueError(f"algo must be one of {_ALGORITHMS}, got {self.algo!r}")

    def fit(self, X, y, sample_weight=None):
        """Fit on points X with color labels y (integer labels, 1..2)."""
        X = check_coords(X, name="X")
        colors, n_colors = check_colors(y, X.shape[0])
        weights = check_weights(sample_weight, X.shape[0])
        dataset = Dataset(X, colors, weights, n_colors)

        if self.use_coreset:
            summary = build_fair_coreset(
                dataset,
                k=self.n_clusters,
                epsilon=self.coreset_epsilon,
                seed=self.random_state or 0,
                target_size=self.coreset_size,
            )
            clustering = self._solve(summary.to_dataset())
            clustering = fair_assignment(dataset, clustering.centers)
        else:
            clustering = self._solve(dataset)

        self.cluster_centers_ = clustering.centers
        self.labels_ = clustering.labels(dataset)
        self.inertia_ = clustering.cost
        self.n_features_in_ = X.shape[1]
        return self

    def fit_predict(self, X, y, sample_weight=None):
        return self.fit(X, y, sample_weight).labels_

    def predict(self, X):
        """Nearest-center labels for new points.

        Fairness is a property of a point set, not of single points, so
        out-of-sample prediction falls back to nearest centers.
        """
        check_is_fitted(self, "cluster_centers_")
        X = check_coords(X, name="X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        _, labels = nearest_center(X, self.cluster_centers_)
        return labels

    def score(self, X, y=None):
        """Negative nearest-center cost (sklearn convention: higher is better)."""
        check_is_fitted(self, "cluster_centers_")
        X = check_coords(X, name="X")
        dmin, _ = nearest_center(X, self.cluster_centers_)
        return -float(dmin.sum())
