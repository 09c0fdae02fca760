"""Evaluation harness: AUC, experiments and parameter sweeps, subspace distances and MDS embeddings."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import (
    Any,
    Dict,
    List,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np
import numpy.typing as npt
from pydantic import ValidationError
from scipy import (
    linalg,
    stats,
)
from scipy.spatial import distance

from .baselines import (
    DEFAULT_MAX_ORDER,
    ar_residual_score,
    fit_ar,
)
from .config import (
    DetectorConfig,
    DistanceMetric,
    Method,
    SweepGrid,
)
from .detector import (
    detect,
    detect_baseline,
    train,
    window_pair,
    window_positions,
)
from .errors import (
    DegenerateInputError,
    EvaluationError,
    ParameterError,
    ShapeError,
    SSADiffspaceError,
)
from .geometry import (
    AnySubspace,
    canonical_angles,
    difference_subspace,
    subspace_dissimilarity,
)
from .types import (
    Dataset,
    EmbeddingExport,
    FloatArray,
    ScoreSeries,
    SweepReport,
    SweepRow,
    TimeSeries,
    TrainedModel,
)
from .utils import fix_signs


logger = logging.getLogger(__name__)

DEFAULT_DIMENSIONS = (1, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50)
DEFAULT_DIMENSION_METHODS = (Method.DS, Method.SSA1, Method.SSAALL)

_CELL_ERRORS = (SSADiffspaceError, ValidationError, np.linalg.LinAlgError)


def auc(scores: npt.ArrayLike, labels: npt.ArrayLike) -> float:
    """Area under the ROC curve by the rank-sum (Mann-Whitney) estimator.

    Equals the probability that a random positive outscores a random negative, ties counting
    one half. Exact: no threshold sampling.

    Raises:
        EvaluationError: If the inputs differ in length, labels are not 0/1, or only one class
            is present.

    Examples:
        >>> auc([0.1, 0.9, 0.2, 0.8], [0, 1, 0, 1])
        1.0
        >>> auc([0.5, 0.5], [0, 1])
        0.5
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.ndim != 1 or s.shape != y.shape:
        raise EvaluationError(f"scores and labels must be equal-length sequences, got {s.shape} and {y.shape}")
    if not np.all(np.isin(y, (0, 1))):
        raise EvaluationError("labels must be 0 or 1")

    positives = y == 1
    n_pos = int(np.count_nonzero(positives))
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise EvaluationError(f"AUC needs both label classes, got {n_pos} positive and {n_neg} negative")

    ranks = stats.rankdata(s, method="average")
    u = ranks[positives].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def aligned_labels(scores: ScoreSeries, series: TimeSeries) -> npt.NDArray[np.int8]:
    """Labels of ``series`` at each score's 1-based ``time_index``.

    Raises:
        EvaluationError: If the series is unlabelled or a time index falls outside it.
    """
    if series.labels is None:
        raise EvaluationError(f"series {series.name} has no labels")
    indices = scores.time_indices
    if indices.size and (indices[0] < 1 or indices[-1] > len(series)):
        raise EvaluationError(f"time indices {indices[0]}..{indices[-1]} fall outside 1..{len(series)}")
    return series.labels[indices - 1]


def _scores_for(dataset: Dataset, method: Method, config: Optional[DetectorConfig], max_order: int) -> ScoreSeries:
    if method is Method.AR:
        return ar_residual_score(fit_ar(dataset.train, max_order), dataset.test)
    if config is None:
        raise ParameterError(f"method {method.value} needs a detector configuration")
    if method is Method.DS:
        return detect(dataset.test, train(dataset.train, config))
    # an angle count of min(w, M) covers every canonical angle
    k = method.angle_count or min(config.w, config.M)
    return detect_baseline(dataset.test, config, k)


def run_experiment(
    dataset: Dataset,
    method: Union[Method, str],
    config: Optional[DetectorConfig] = None,
    max_order: int = DEFAULT_MAX_ORDER,
) -> Tuple[ScoreSeries, float]:
    """Score the test portion of a dataset with one method and compute its AUC.

    The difference-subspace detector trains on the anomaly-free prefix; the AR baseline fits
    there; the SSA baselines need no training. Each score is paired with the test label at its
    time index.

    Args:
        dataset: Labelled series with its split.
        method: Scoring method.
        config: Detector parameters (unused by ``Method.AR``).
        max_order: Largest AR order tried by ``Method.AR``.

    Returns:
        ``(scores, auc)``.

    Raises:
        EvaluationError: If the aligned test labels hold a single class.
        SSADiffspaceError: Propagated from training and scoring.
    """
    method = Method(method)
    scores = _scores_for(dataset, method, config, max_order)
    value = auc(scores.degrees, aligned_labels(scores, dataset.test))
    logger.info("%s on %s: AUC=%.4f over %d scores", method.value, dataset.series.name, value, len(scores))
    return scores, value


def _split_cell(cell: Dict[str, Any], method: Method) -> Tuple[Optional[DetectorConfig], int]:
    max_order = int(cell.get("max_order", DEFAULT_MAX_ORDER))
    if method is Method.AR:
        return None, max_order
    fields = {key: value for key, value in cell.items() if key != "max_order"}
    return DetectorConfig.model_validate(fields), max_order


def _row_params(
    cell: Dict[str, Any], config: Optional[DetectorConfig], max_order: int, method: Method
) -> Dict[str, Any]:
    params = dict(cell)
    if config is not None:
        params.update(
            {
                "w": config.w,
                "M": config.M,
                "tau": config.lag,
                "ov_rate": config.ov_rate,
                "r": config.sig_dims.rank if config.sig_dims.kind == "fixed" else str(config.sig_dims),
                "nor_dims": config.nor_dims,
                "c": config.c,
                "delta_floor": config.delta_floor,
            }
        )
    if method is Method.AR:
        params["max_order"] = max_order
    return params


def _run_cell(dataset: Dataset, method: Method, cell: Dict[str, Any]) -> SweepRow:
    start = time.perf_counter()
    params = dict(cell)
    try:
        config, max_order = _split_cell(cell, method)
        params = _row_params(cell, config, max_order, method)
        _, value = run_experiment(dataset, method, config, max_order)
    except _CELL_ERRORS as e:
        elapsed = time.perf_counter() - start
        message = str(e).splitlines()[0] if str(e) else type(e).__name__
        logger.warning("%s cell %s failed: %s: %s", method.value, cell, type(e).__name__, message)
        return SweepRow(method=method, params=params, seconds=elapsed, error=f"{type(e).__name__}: {message}")
    return SweepRow(method=method, params=params, auc=value, seconds=time.perf_counter() - start)


def sweep(
    dataset: Dataset,
    method: Union[Method, str],
    grid: SweepGrid,
    workers: int = 1,
) -> SweepReport:
    """Evaluate every cell of a parameter grid with one method.

    Cells are independent and may run on ``workers`` threads; rows keep the grid order. A cell
    that fails is recorded with its error and no AUC.

    Raises:
        ParameterError: If ``workers < 1``.
    """
    method = Method(method)
    if workers < 1:
        raise ParameterError(f"workers must satisfy workers >= 1, got {workers}")
    cells = grid.cells()
    logger.info("Sweeping %d cells with %s on %s", len(cells), method.value, dataset.series.name)

    if workers == 1 or len(cells) < 2:
        rows = [_run_cell(dataset, method, cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(lambda cell: _run_cell(dataset, method, cell), cells))

    report = SweepReport(rows=rows)
    best = report.best_per_method.get(method)
    if best is None:
        logger.warning("Every %s cell failed", method.value)
    else:
        logger.info("Best %s AUC=%.4f at %s", method.value, best[1], best[0])
    return report


def dimension_sweep(
    dataset: Dataset,
    base_config: DetectorConfig,
    methods: Sequence[Union[Method, str]] = DEFAULT_DIMENSION_METHODS,
    dims: Sequence[int] = DEFAULT_DIMENSIONS,
    workers: int = 1,
) -> SweepReport:
    """AUC of several methods as the signal-subspace rank varies, all else fixed.

    Returns one row per (method, rank); ``report.best_by("r")`` gives the per-rank curves.
    """
    base = base_config.model_dump(exclude={"sig_dims"})
    grid = SweepGrid(base=base, grid={"sig_dims": list(dims)})
    report = SweepReport(rows=[])
    for method in methods:
        report = report.merged(sweep(dataset, method, grid, workers))
    return report


def _pair_distance(a: AnySubspace, b: AnySubspace, metric: DistanceMetric, c: int) -> float:
    if metric is DistanceMetric.MIN_ANGLE:
        cosines = canonical_angles(a, b).cosines
        return float(1.0 - cosines[0]) if cosines.size else 1.0
    return subspace_dissimilarity(a, b, c)


def pairwise_subspace_distances(
    items: Sequence[AnySubspace],
    metric: Union[DistanceMetric, str] = DistanceMetric.MIN_ANGLE,
    c: int = 5,
) -> FloatArray:
    """Symmetric matrix of distances between subspaces.

    ``min-angle`` uses ``1 - cos(theta_1)``; ``eq4`` the mean ``1 - cos`` over the ``c``
    smallest angles. The diagonal is zero and ``d[j, i]`` is copied from ``d[i, j]``.

    Raises:
        DegenerateInputError: If fewer than two items are given.
        ShapeError: If the ambient dimensions differ.
    """
    metric = DistanceMetric(metric)
    if len(items) < 2:
        raise DegenerateInputError(f"at least two subspaces are needed, got {len(items)}")
    ambient = items[0].ambient_dim
    for item in items[1:]:
        if item.ambient_dim != ambient:
            raise ShapeError(f"ambient dimensions differ: {ambient} != {item.ambient_dim}")

    n = len(items)
    distances = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            distances[i, j] = distances[j, i] = _pair_distance(items[i], items[j], metric, c)
    return distances


def double_center(distances: npt.ArrayLike) -> FloatArray:
    """``B = -1/2 * J D^2 J`` with the centering matrix ``J = I - 11^T / n``."""
    D = np.asarray(distances, dtype=np.float64)
    n = D.shape[0]
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    return -0.5 * J @ (D**2) @ J


def mds_embed(
    distances: npt.ArrayLike,
    dim: int = 3,
    labels: Optional[npt.ArrayLike] = None,
    time_indices: Optional[npt.ArrayLike] = None,
) -> EmbeddingExport:
    """Classical multidimensional scaling of a distance matrix.

    Double-centres the squared distances, keeps the eigenpairs with the ``dim`` largest
    positive eigenvalues and scales each eigenvector by the root of its eigenvalue. When fewer
    than ``dim`` eigenvalues are positive the export has fewer columns and a warning.

    Args:
        distances: Square symmetric matrix with zero diagonal.
        dim: Requested number of axes.
        labels: Class of each point. Defaults to 0.
        time_indices: Time index of each point. Defaults to ``1 .. n``.

    Returns:
        EmbeddingExport whose stress is ``||D - D_hat||_F / ||D||_F`` (0 when ``D`` is zero).

    Raises:
        ShapeError: If the matrix is not square.
        ParameterError: If it is not symmetric with a zero diagonal, or ``dim < 1``.
    """
    D = np.asarray(distances, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] == 0:
        raise ShapeError(f"distance matrix must be square and non-empty, got shape {D.shape}")
    if dim < 1:
        raise ParameterError(f"dim must satisfy dim >= 1, got {dim}")
    scale = max(1.0, float(np.abs(D).max()))
    if not np.allclose(D, D.T, rtol=0.0, atol=1e-8 * scale):
        raise ParameterError("distance matrix must be symmetric")
    if np.abs(np.diag(D)).max() > 1e-8 * scale:
        raise ParameterError("distance matrix must have a zero diagonal")
    D = (D + D.T) / 2.0
    np.fill_diagonal(D, 0.0)
    n = D.shape[0]

    eigenvalues, eigenvectors = linalg.eigh(double_center(D))
    order = np.argsort(eigenvalues, kind="stable")[::-1]
    eigenvalues, eigenvectors = eigenvalues[order], eigenvectors[:, order]

    tolerance = 1e-10 * max(1.0, float(eigenvalues[0]))
    axes = min(dim, int(np.count_nonzero(eigenvalues > tolerance)))
    coordinates = fix_signs(eigenvectors[:, :axes]) * np.sqrt(eigenvalues[:axes])

    warning = None
    if axes < dim:
        warning = f"only {axes} of {dim} requested axes have positive eigenvalues"
        logger.warning("MDS: %s", warning)

    embedded = distance.squareform(distance.pdist(coordinates)) if axes else np.zeros((n, n))
    norm = float(np.linalg.norm(D))
    stress = float(np.linalg.norm(D - embedded) / norm) if norm > 0.0 else 0.0

    return EmbeddingExport(
        coordinates=coordinates,
        labels=np.zeros(n, dtype=np.int8) if labels is None else np.asarray(labels, dtype=np.int8),
        time_indices=np.arange(1, n + 1) if time_indices is None else np.asarray(time_indices, dtype=np.int64),
        stress=stress,
        eigenvalues=eigenvalues,
        warning=warning,
    )


def collect_embedding_items(
    series: TimeSeries,
    model: TrainedModel,
    metric: Union[DistanceMetric, str] = DistanceMetric.MIN_ANGLE,
    max_ds_dims: Optional[int] = None,
) -> Tuple[List[AnySubspace], npt.NDArray[np.int8], npt.NDArray[np.int64]]:
    """Subspaces to embed for every window pair of ``series``, with their labels and time indices.

    The ``min-angle`` view uses the present signal subspaces. The ``eq4`` view uses the
    input difference subspaces, keeping at most ``max_ds_dims`` directions (the largest
    G-eigenvalues) and skipping empty ones.

    Raises:
        BoundsError: If the series is too short for a single window pair.
        DegenerateInputError: If fewer than two items remain.
    """
    metric = DistanceMetric(metric)
    config = model.config
    t_c = config.t_c
    items: List[AnySubspace] = []
    time_indices: List[int] = []
    for t in window_positions(series, config):
        past, present = window_pair(series, t, config)
        if metric is DistanceMetric.MIN_ANGLE:
            items.append(present)
        else:
            ds = difference_subspace(past, present, config.delta_floor)
            if ds.is_empty:
                continue
            items.append(ds if max_ds_dims is None else ds.leading(max_ds_dims))
        time_indices.append(t - t_c)

    if len(items) < 2:
        raise DegenerateInputError(f"only {len(items)} subspaces to embed from {series.name}")
    indices = np.array(time_indices, dtype=np.int64)
    labels = np.zeros(indices.size, dtype=np.int8) if series.labels is None else series.labels[indices - 1]
    logger.info("Collected %d %s subspaces from %s", len(items), metric.value, series.name)
    return items, labels, indices


def embed_series(
    series: TimeSeries,
    model: TrainedModel,
    metric: Union[DistanceMetric, str] = DistanceMetric.MIN_ANGLE,
    dim: int = 3,
    max_ds_dims: Optional[int] = None,
) -> EmbeddingExport:
    """Collect the subspaces of ``series``, compute their distances and embed them with MDS."""
    items, labels, time_indices = collect_embedding_items(series, model, metric, max_ds_dims)
    distances = pairwise_subspace_distances(items, metric, model.config.c)
    return mds_embed(distances, dim, labels, time_indices)
