"""Fair k-means clustering with coresets, sketches, and flow-based assignment."""

from .core import (
    CenterSet,
    ColoredPoint,
    Dataset,
    FairClustering,
    assignment_cost,
    balance,
    centroid,
    check_fair,
    color_fraction,
    kmeans_cost,
)
from .errors import (
    BalanceError,
    DataFormatError,
    InfeasibleTransportError,
    SizeGuardError,
)
from .transport import (
    FlowResult,
    TransportProblem,
    min_cost_perfect_matching,
    solve_transport,
)
from .fairlets import Fairlet, FairletDecomposition, compute_fairlets, fairlet_lower_bound
from .assignment import (
    ColoringConstraint,
    ConstrainedCost,
    color_constrained_cost,
    enumerate_coloring_constraints,
    fair_assignment,
    fairness_constraints_cover,
)
from .solvers import (
    SolverConfig,
    PhaseTimer,
    brute_force_opt,
    cklv_kmeanspp,
    fair_kmeanspp,
    kmeanspp_seed,
    lloyd,
    ptas,
    reassigned_cklv,
)
from .coreset import (
    CoresetBuilder,
    CoresetVerification,
    FairCoreset,
    build_fair_coreset,
    load_coreset,
    merge_coresets,
    recompress,
    save_coreset,
    verify_coreset,
)
from .sketch import (
    Sketch,
    SketchSummary,
    cluster_sketch,
    load_sketch,
    make_projection,
    recover_centers,
    save_sketch,
)
from .estimators import FairKMeans
from .datagen import balanced_blobs
from .ingestion import IngestResult, ingest_csv, write_dataset_csv
from .experiment import (
    ExperimentConfig,
    ExperimentReport,
    RunRecord,
    emit_report,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "BalanceError",
    "CenterSet",
    "ColoredPoint",
    "ColoringConstraint",
    "ConstrainedCost",
    "CoresetBuilder",
    "CoresetVerification",
    "DataFormatError",
    "Dataset",
    "ExperimentConfig",
    "ExperimentReport",
    "FairClustering",
    "FairCoreset",
    "FairKMeans",
    "Fairlet",
    "FairletDecomposition",
    "FlowResult",
    "InfeasibleTransportError",
    "IngestResult",
    "PhaseTimer",
    "RunRecord",
    "Sketch",
    "SketchSummary",
    "SizeGuardError",
    "SolverConfig",
    "TransportProblem",
    "assignment_cost",
    "balance",
    "balanced_blobs",
    "brute_force_opt",
    "build_fair_coreset",
    "centroid",
    "check_fair",
    "cklv_kmeanspp",
    "cluster_sketch",
    "color_constrained_cost",
    "color_fraction",
    "compute_fairlets",
    "emit_report",
    "enumerate_coloring_constraints",
    "fair_assignment",
    "fair_kmeanspp",
    "fairlet_lower_bound",
    "fairness_constraints_cover",
    "ingest_csv",
    "kmeans_cost",
    "kmeanspp_seed",
    "lloyd",
    "load_coreset",
    "load_sketch",
    "make_projection",
    "merge_coresets",
    "min_cost_perfect_matching",
    "ptas",
    "reassigned_cklv",
    "recompress",
    "recover_centers",
    "run_experiment",
    "save_coreset",
    "save_sketch",
    "solve_transport",
    "verify_coreset",
    "write_dataset_csv",
]
