"""Training and detection with difference subspaces, plus the SSA canonical-angle baselines.

A window pair at 1-based sample index ``t`` consists of the present trajectory matrix ending at
``t`` and the past one ending at ``t - tau``; together they cover ``w + M + tau - 1`` samples.
Scores are reported at ``t - t_c`` with ``t_c = round((w + M + tau) / 2)`` (halves round up),
the centre of that interval.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import (
    Callable,
    List,
    NamedTuple,
    Sequence,
    Tuple,
    TypeVar,
)

import numpy as np

from .config import DetectorConfig
from .errors import (
    BoundsError,
    DegenerateTrainingError,
    ParameterError,
)
from .geometry import (
    canonical_angles,
    difference_subspace,
    magnitude,
    mean_angle_dissimilarity,
    principal_component_subspace,
    subspace_dissimilarity,
)
from .ssa import (
    build_trajectory_matrix,
    signal_subspace,
)
from .types import (
    DifferenceSubspace,
    ScorePoint,
    ScoreSeries,
    Subspace,
    TimeSeries,
    TrainedModel,
)
from .utils import round_half_up


logger = logging.getLogger(__name__)

T = TypeVar("T")


class _PairAnalysis(NamedTuple):
    t: int
    ds: DifferenceSubspace
    mu: float


def tau_from_overlap(w: int, M: int, ov_rate: float) -> int:
    """Convert an overlap rate of the past and present segments into a lag in samples.

    ``tau = max(1, round((1 - ov_rate) * (w + M - 1)))`` where ``w + M - 1`` is the number of
    samples one trajectory matrix covers. Halves round up.

    Raises:
        ParameterError: If ``ov_rate`` is outside (0, 1).

    Examples:
        >>> tau_from_overlap(128, 128, 0.7)
        77
        >>> tau_from_overlap(64, 64, 0.5)
        64
    """
    if not 0.0 < ov_rate < 1.0:
        raise ParameterError(f"ov_rate must satisfy 0 < ov_rate < 1, got {ov_rate}")
    return max(1, round_half_up((1.0 - ov_rate) * (w + M - 1)))


def window_pair(series: TimeSeries, t: int, config: DetectorConfig) -> Tuple[Subspace, Subspace]:
    """Past and present signal subspaces of the window pair ending at ``t``.

    Returns:
        ``(P_past, P_present)`` built from the trajectory matrices ending at ``t - tau`` and ``t``.

    Raises:
        BoundsError: If ``t < w + M + tau - 1`` or ``t`` is past the end of the series.
    """
    if t < config.first_position:
        raise BoundsError(f"sample index must satisfy t >= w + M + tau - 1 = {config.first_position}, got t={t}")
    present = signal_subspace(build_trajectory_matrix(series, t, config.w, config.M), config.sig_dims)
    past = signal_subspace(build_trajectory_matrix(series, t - config.lag, config.w, config.M), config.sig_dims)
    return past, present


def ssa_theta_score(P_past: Subspace, P_present: Subspace, k: int) -> float:
    """SSA baseline score: mean ``1 - cos(theta_i)`` over the ``k`` smallest canonical angles.

    ``k = 1`` is the classic minimum-angle score ``1 - cos(theta_1)``; ``k`` at least the
    subspace dimension averages over all angles.

    Raises:
        ParameterError: If ``k < 1``.
        ShapeError: If the ambient dimensions differ.
    """
    if k < 1:
        raise ParameterError(f"angle count must satisfy k >= 1, got {k}")
    return mean_angle_dissimilarity(canonical_angles(P_past, P_present).cosines, k)


def change_degree(D_in: DifferenceSubspace, mu_in: float, model: TrainedModel) -> float:
    """Change degree ``beta * dissimilarity(D_in, D_N)`` with ``beta = (mu_in - mu(D_N))^2``.

    An empty ``D_in`` has no difference component, so its direction term is 0.
    """
    return _change_degree(D_in, mu_in, model.reference_ds, model.reference_magnitude, model.config.c)


def _change_degree(
    D_in: DifferenceSubspace, mu_in: float, reference_ds: Subspace, reference_mu: float, c: int
) -> float:
    if D_in.is_empty:
        return 0.0
    beta = (mu_in - reference_mu) ** 2
    return beta * subspace_dissimilarity(D_in, reference_ds, c)


def window_positions(series: TimeSeries, config: DetectorConfig) -> List[int]:
    """1-based sample indices ``t`` of every window pair, from ``w + M + tau - 1`` in steps of ``stride``."""
    first = config.first_position
    if len(series) < first:
        raise BoundsError(
            f"series length must satisfy n >= w + M + tau - 1 = {first}, got n={len(series)} ({series.name})"
        )
    return list(range(first, len(series) + 1, config.stride))


def _map_positions(fn: Callable[[int], T], positions: Sequence[int], workers: int) -> List[T]:
    """Evaluate ``fn`` at every position; results come back in position order."""
    if workers <= 1 or len(positions) < 2:
        return [fn(t) for t in positions]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, positions))


def _analyse(series: TimeSeries, t: int, config: DetectorConfig) -> _PairAnalysis:
    past, present = window_pair(series, t, config)
    return _PairAnalysis(t=t, ds=difference_subspace(past, present, config.delta_floor), mu=magnitude(past, present))


def train(series: TimeSeries, config: DetectorConfig) -> TrainedModel:
    """Learn the non-anomalous difference subspace, reference magnitude and threshold.

    Slides over the (assumed anomaly-free) series with ``config.stride``. At every position the
    difference subspace ``D_i`` and magnitude ``mu_i`` of the window pair are computed. The
    reference subspace is the principal component subspace of all ``D_i`` and the reference
    magnitude the mean of ``mu_i``. The same positions are then scored against the reference
    and the threshold is the mean of those training degrees.

    Raises:
        BoundsError: If the series is too short for a single window pair.
        DegenerateTrainingError: If every ``D_i`` is empty (the data repeats exactly at lag tau).
    """
    positions = window_positions(series, config)
    logger.info(
        "Training on %d window positions of %s (w=%d, M=%d, tau=%d, stride=%d)",
        len(positions),
        series.name,
        config.w,
        config.M,
        config.lag,
        config.stride,
    )

    analyses = _map_positions(lambda t: _analyse(series, t, config), positions, config.workers)
    empty = sum(1 for analysis in analyses if analysis.ds.is_empty)
    if empty == len(analyses):
        raise DegenerateTrainingError(
            f"all {len(analyses)} training difference subspaces are empty; "
            f"the normal data is identical at lag tau={config.lag}"
        )
    if empty:
        logger.debug("%d of %d training difference subspaces are empty", empty, len(analyses))

    reference_ds = principal_component_subspace([analysis.ds for analysis in analyses], config.nor_dims)
    reference_mu = float(np.mean([analysis.mu for analysis in analyses]))
    degrees = np.array(
        [_change_degree(analysis.ds, analysis.mu, reference_ds, reference_mu, config.c) for analysis in analyses]
    )

    model = TrainedModel(
        reference_ds=reference_ds,
        reference_magnitude=reference_mu,
        threshold=float(np.mean(degrees)),
        training_degrees=degrees,
        config=config,
        training_window_count=len(positions),
    )
    logger.info(
        "Trained model: reference dims=%d, reference magnitude=%.6g, threshold=%.6g",
        reference_ds.dim,
        model.reference_magnitude,
        model.threshold,
    )
    return model


def detect(series: TimeSeries, model: TrainedModel) -> ScoreSeries:
    """Score every window pair of ``series`` against a trained model.

    Each point is reported at ``t - t_c`` and flagged when its degree exceeds the threshold.

    Raises:
        BoundsError: If the series is too short for a single window pair.
    """
    config = model.config
    positions = window_positions(series, config)
    logger.info("Detecting on %d window positions of %s", len(positions), series.name)

    analyses = _map_positions(lambda t: _analyse(series, t, config), positions, config.workers)
    t_c = config.t_c
    points = []
    for analysis in analyses:
        degree = change_degree(analysis.ds, analysis.mu, model)
        points.append(ScorePoint(time_index=analysis.t - t_c, degree=degree, flag=degree > model.threshold))
    return ScoreSeries(points=points)


def detect_baseline(series: TimeSeries, config: DetectorConfig, k: int) -> ScoreSeries:
    """SSA canonical-angle baseline scores, aligned like :func:`detect`. No flags are set.

    Raises:
        BoundsError: If the series is too short for a single window pair.
        ParameterError: If ``k < 1``.
    """
    if k < 1:
        raise ParameterError(f"angle count must satisfy k >= 1, got {k}")
    positions = window_positions(series, config)
    logger.info("Scoring SSA baseline (k=%d) on %d window positions of %s", k, len(positions), series.name)

    def score(t: int) -> float:
        past, present = window_pair(series, t, config)
        return ssa_theta_score(past, present, k)

    degrees = _map_positions(score, positions, config.workers)
    t_c = config.t_c
    return ScoreSeries(points=[ScorePoint(time_index=t - t_c, degree=d) for t, d in zip(positions, degrees)])
