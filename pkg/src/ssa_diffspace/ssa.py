"""Trajectory matrices and SSA signal subspaces.

Indexing convention: formulas use 1-based sample indices ``h(1) .. h(n)``. The trajectory matrix
ending at ``t`` has 1-based entries ``H[i, j] = h(t - w - M + i + j)``, i.e. it covers the
``w + M - 1`` samples ``h(t - w - M + 2) .. h(t)``. In 0-based storage this is
``samples[t - w - M + 1 : t]``.
"""

import logging
from typing import Union

import numpy as np
import numpy.typing as npt
from scipy import linalg

from .config import RankRule
from .errors import (
    BoundsError,
    DegenerateInputError,
    ParameterError,
)
from .types import (
    Subspace,
    TimeSeries,
    TrajectoryMatrix,
)
from .utils import fix_signs


logger = logging.getLogger(__name__)


def build_trajectory_matrix(series: TimeSeries, t: int, w: int, M: int) -> TrajectoryMatrix:
    """Build the ``w x M`` Hankel trajectory matrix whose last column ends at sample ``t``.

    Args:
        series: Source series (not modified).
        t: 1-based index of the last covered sample.
        w: Window width (rows).
        M: Number of windows (columns).

    Returns:
        TrajectoryMatrix with ``entries[i][j] == h(t - w - M + i + j)`` for 1-based ``i, j``.

    Raises:
        BoundsError: If ``w < 2``, ``M < 2``, ``t < w + M - 1`` or ``t > len(series)``.

    Examples:
        >>> series = TimeSeries(samples=[1.0, 2.0, 3.0, 4.0])
        >>> build_trajectory_matrix(series, t=4, w=2, M=3).entries.tolist()
        [[1.0, 2.0, 3.0], [2.0, 3.0, 4.0]]
    """
    if w < 2:
        raise BoundsError(f"window width must satisfy w >= 2, got w={w}")
    if M < 2:
        raise BoundsError(f"window count must satisfy M >= 2, got M={M}")
    if t < w + M - 1:
        raise BoundsError(f"sample index must satisfy t >= w + M - 1 = {w + M - 1}, got t={t}")
    if t > len(series):
        raise BoundsError(f"sample index must satisfy t <= length = {len(series)}, got t={t}")

    segment = series.samples[t - w - M + 1 : t]
    return TrajectoryMatrix(entries=linalg.hankel(segment[:w], r=segment[w - 1 :]), t=t)


def choose_rank(spectrum: npt.ArrayLike, energy: float) -> int:
    """Smallest ``k`` whose leading eigenvalues hold at least ``energy`` of the total.

    Args:
        spectrum: Descending nonnegative eigenvalues.
        energy: Cumulative contribution to reach, ``0 < energy <= 1``.

    Raises:
        ParameterError: If ``energy`` is outside (0, 1] or the spectrum is empty.
        DegenerateInputError: If the spectrum sums to zero.

    Examples:
        >>> choose_rank([4, 3, 2, 1], 0.5)
        2
        >>> choose_rank([5, 4, 1], 0.9)
        2
    """
    values = np.asarray(spectrum, dtype=np.float64)
    if values.size == 0:
        raise ParameterError("spectrum must be non-empty")
    if not 0.0 < energy <= 1.0:
        raise ParameterError(f"energy must satisfy 0 < energy <= 1, got {energy}")
    total = float(values.sum())
    if total <= 0.0:
        raise DegenerateInputError("cannot choose a rank from an all-zero spectrum")

    shares = np.cumsum(values) / total
    # float rounding can leave the final share a hair below 1.0
    shares[-1] = 1.0
    return int(np.searchsorted(shares, energy, side="left")) + 1


def signal_subspace(H: Union[TrajectoryMatrix, npt.ArrayLike], rank: RankRule) -> Subspace:
    """Signal subspace of a trajectory matrix: its top left singular vectors.

    The left singular vectors of ``H`` are the eigenvectors of ``H H^T`` and the squared
    singular values its eigenvalues, so the thin SVD solves the SSA eigenproblem without
    forming ``H H^T``. Each basis column is sign-normalised (largest-magnitude entry
    nonnegative) so results are reproducible. Repeated singular values keep the order
    returned by the factorisation; canonical angles computed downstream do not depend on
    that order, bases do.

    Args:
        H: Trajectory matrix (or any real 2-D array).
        rank: Fixed rank or cumulative-energy rule.

    Raises:
        BoundsError: If a fixed rank exceeds ``min(w, M)``.
        DegenerateInputError: If an energy rule is applied to a zero matrix.
    """
    entries = H.entries if isinstance(H, TrajectoryMatrix) else np.asarray(H, dtype=np.float64)
    max_rank = min(entries.shape)

    u, s, _ = linalg.svd(entries, full_matrices=False)
    spectrum = s**2

    if rank.kind == "fixed":
        r = rank.rank
        if r > max_rank:
            raise BoundsError(f"rank must satisfy r <= min(w, M) = {max_rank}, got r={r}")
    else:
        r = choose_rank(spectrum, rank.value)
        logger.debug("Energy rule %.3f selected rank %d of %d", rank.value, r, max_rank)

    return Subspace(basis=fix_signs(u[:, :r]), spectrum=spectrum[:r])
