"""SSA Difference-Subspace Change-Point Detection.

A Python library for detecting change points in univariate time series. Past and present
segments are summarised by SSA signal subspaces; the difference subspace between them tells
how and how much the local structure moved. A detector trained on normal data scores every
sliding window pair by comparing its difference subspace with the normal one.

Key Features:
    - Hankel trajectory matrices and signal subspaces with fixed or energy-based rank
    - Canonical angles, geometric and analytic difference subspaces, magnitude index
    - Training/detection with principal component subspaces of normal differences
    - SSA canonical-angle and AR prediction baselines
    - AUC evaluation, parameter sweeps and MDS embeddings of subspaces
    - A command-line interface (``ssa-diffspace``)

Examples:
::

    Train on normal data and score a series:
    >>> from ssa_diffspace import DetectorConfig, detect, load_series, train
    >>> config = DetectorConfig(w=64, M=64, ov_rate=0.5, sig_dims=10, nor_dims=20)
    >>> model = train(load_series("normal.txt"), config)
    >>> scores = detect(load_series("observed.txt"), model)

    Evaluate a labelled series against the baselines:
    >>> from ssa_diffspace import Dataset, Method, run_experiment
    >>> dataset = Dataset.from_series(load_series("chfdb_chf01_275_1.txt"))
    >>> _, ours = run_experiment(dataset, Method.DS, config)
    >>> _, ssa = run_experiment(dataset, Method.SSA1, config)

    Configuring logging:
    >>> from ssa_diffspace import configure_logging
    >>> configure_logging(level="DEBUG")  # Enable debug logging
    >>> # Or use Python's logging module directly:
    >>> import logging
    >>> logging.getLogger("ssa_diffspace").setLevel(logging.DEBUG)
"""

__version__ = "0.1.0"

from .baselines import (
    ar_residual_score,
    fit_ar,
)
from .config import (
    DetectorConfig,
    DistanceMetric,
    Method,
    RankRule,
    SweepGrid,
    SyntheticSpec,
    load_config,
)
from .detector import (
    change_degree,
    detect,
    detect_baseline,
    ssa_theta_score,
    tau_from_overlap,
    train,
    window_pair,
)
from .errors import (
    BoundsError,
    ConditioningError,
    DegenerateInputError,
    DegenerateTrainingError,
    EvaluationError,
    ParameterError,
    ParseError,
    ShapeError,
    SSADiffspaceError,
)
from .evaluation import (
    auc,
    dimension_sweep,
    embed_series,
    mds_embed,
    pairwise_subspace_distances,
    run_experiment,
    sweep,
)
from .geometry import (
    canonical_angles,
    difference_subspace,
    difference_subspace_analytic,
    magnitude,
    principal_component_subspace,
    subspace_dissimilarity,
)
from .io import (
    generate_synthetic,
    load_model,
    load_series,
    save_model,
    write_scores,
    write_series,
)
from .ssa import (
    build_trajectory_matrix,
    choose_rank,
    signal_subspace,
)
from .types import (
    ARModel,
    CanonicalAngleSet,
    Dataset,
    DifferenceSubspace,
    EmbeddingExport,
    ScorePoint,
    ScoreSeries,
    Subspace,
    SweepReport,
    TimeSeries,
    TrainedModel,
    TrajectoryMatrix,
)
from .utils import configure_logging


__all__ = [
    # Configuration models
    "DetectorConfig",
    "DistanceMetric",
    "Method",
    "RankRule",
    "SweepGrid",
    "SyntheticSpec",
    "load_config",
    # Type definitions
    "ARModel",
    "CanonicalAngleSet",
    "Dataset",
    "DifferenceSubspace",
    "EmbeddingExport",
    "ScorePoint",
    "ScoreSeries",
    "Subspace",
    "SweepReport",
    "TimeSeries",
    "TrainedModel",
    "TrajectoryMatrix",
    # SSA and subspace geometry
    "build_trajectory_matrix",
    "choose_rank",
    "signal_subspace",
    "canonical_angles",
    "difference_subspace",
    "difference_subspace_analytic",
    "magnitude",
    "principal_component_subspace",
    "subspace_dissimilarity",
    # Detection and baselines
    "change_degree",
    "detect",
    "detect_baseline",
    "ssa_theta_score",
    "tau_from_overlap",
    "train",
    "window_pair",
    "ar_residual_score",
    "fit_ar",
    # Evaluation
    "auc",
    "dimension_sweep",
    "embed_series",
    "mds_embed",
    "pairwise_subspace_distances",
    "run_experiment",
    "sweep",
    # Files
    "generate_synthetic",
    "load_model",
    "load_series",
    "save_model",
    "write_scores",
    "write_series",
    # Errors
    "SSADiffspaceError",
    "BoundsError",
    "ConditioningError",
    "DegenerateInputError",
    "DegenerateTrainingError",
    "EvaluationError",
    "ParameterError",
    "ParseError",
    "ShapeError",
    # Utility functions
    "configure_logging",
    # Version
    "__version__",
]
