"""Type definitions for ssa_diffspace.

Numerical payloads are stored as read-only float64 numpy arrays so that instances can be
shared between threads without copying.
"""

from typing import (
    Any,
    Dict,
    List,
    Optional,
    Tuple,
)

import numpy as np
import numpy.typing as npt
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_validator,
)

from .config import (
    DetectorConfig,
    Method,
)
from .utils import (
    readonly,
    round_half_up,
)


FloatArray = npt.NDArray[np.float64]

UCR_SPLITS: Dict[str, Tuple[int, int]] = {
    "chfdb_chf01_275_1": (1000, 2500),
    "chfdb_chf01_275_2": (1000, 2500),
    "mitdb__100_180_1": (1000, 2500),
    "mitdb__100_180_2": (1000, 2500),
    "nprs44": (2800, 6500),
    "stdb_308_0_1": (1500, 3500),
    "stdb_308_0_2": (1500, 3500),
}
"""Train/test sample counts of the UCR anomaly series used in the benchmark tests."""


class _ArrayModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class TimeSeries(_ArrayModel):
    """A finite sequence of scalar samples with optional binary anomaly labels.

    Attributes:
        samples: Finite real samples.
        labels: Optional 0/1 flags of the same length (1 marks an anomalous instant).
        name: Identifier of the series.

    Note:
        Formulas index samples from 1 (``h(1) .. h(n)``); storage is 0-based, so ``h(t)`` is
        ``samples[t - 1]``.
    """

    samples: np.ndarray
    labels: Optional[np.ndarray] = None
    name: str = "series"

    @field_validator("samples", mode="before")
    @classmethod
    def _check_samples(cls, value: Any) -> FloatArray:
        samples = readonly(value)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty one-dimensional sequence")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite (no NaN/Inf)")
        return samples

    @field_validator("labels", mode="before")
    @classmethod
    def _check_labels(cls, value: Any) -> Optional[npt.NDArray[np.int8]]:
        if value is None:
            return None
        raw = np.asarray(value)
        if raw.ndim != 1 or not np.all(np.isin(raw, (0, 1))):
            raise ValueError("labels must be a one-dimensional sequence of 0/1 flags")
        return readonly(raw, dtype=np.int8)

    @model_validator(mode="after")
    def _check_lengths(self) -> "TimeSeries":
        if self.labels is not None and self.labels.size != self.samples.size:
            raise ValueError(f"labels length {self.labels.size} != samples length {self.samples.size}")
        return self

    def __len__(self) -> int:
        return int(self.samples.size)

    def slice(self, start: int, stop: int, name: Optional[str] = None) -> "TimeSeries":
        """Return the 0-based half-open range ``[start, stop)`` as a new series."""
        labels = None if self.labels is None else self.labels[start:stop]
        return TimeSeries(samples=self.samples[start:stop], labels=labels, name=name or self.name)

    def scaled(self, factor: float) -> "TimeSeries":
        return TimeSeries(samples=self.samples * factor, labels=self.labels, name=self.name)


class TrajectoryMatrix(_ArrayModel):
    """Hankel matrix of lagged sliding windows ending at sample ``t`` (1-based)."""

    entries: np.ndarray
    t: int

    @field_validator("entries", mode="before")
    @classmethod
    def _freeze(cls, value: Any) -> FloatArray:
        return readonly(value)

    @property
    def w(self) -> int:
        return int(self.entries.shape[0])

    @property
    def M(self) -> int:
        return int(self.entries.shape[1])


class Subspace(_ArrayModel):
    """Orthonormal basis of an r-dimensional subspace of w-dimensional space.

    Attributes:
        basis: ``w x r`` matrix with orthonormal columns.
        spectrum: ``r`` descending nonnegative values attached to the basis vectors
                  (eigenvalues of ``H H^T`` for signal subspaces).
    """

    basis: np.ndarray
    spectrum: np.ndarray

    @field_validator("basis", "spectrum", mode="before")
    @classmethod
    def _freeze(cls, value: Any) -> FloatArray:
        return readonly(value)

    @model_validator(mode="after")
    def _check_shapes(self) -> "Subspace":
        if self.basis.ndim != 2 or self.basis.shape[1] < 1:
            raise ValueError("basis must be a w x r matrix with r >= 1")
        if self.spectrum.shape != (self.basis.shape[1],):
            raise ValueError(f"spectrum must hold {self.basis.shape[1]} values, got shape {self.spectrum.shape}")
        return self

    @property
    def ambient_dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    @classmethod
    def from_basis(cls, basis: npt.ArrayLike) -> "Subspace":
        """Orthonormalise ``basis`` (QR) and wrap it with a unit spectrum. Handy for tests and tools."""
        matrix = np.asarray(basis, dtype=np.float64)
        if matrix.ndim == 1:
            matrix = matrix[:, None]
        q, _ = np.linalg.qr(matrix)
        return cls(basis=q, spectrum=np.ones(q.shape[1]))


class CanonicalAngleSet(_ArrayModel):
    """Canonical angles between two subspaces.

    Attributes:
        cosines: ``cos(theta_i)`` sorted descending, clamped into [0, 1].
        left_vectors: Canonical vectors ``u_i`` in the first subspace (columns).
        right_vectors: Canonical vectors ``v_i`` in the second subspace (columns).
    """

    cosines: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    @field_validator("cosines", "left_vectors", "right_vectors", mode="before")
    @classmethod
    def _freeze(cls, value: Any) -> FloatArray:
        return readonly(value)

    def __len__(self) -> int:
        return int(self.cosines.size)


class DifferenceSubspace(_ArrayModel):
    """Difference component between two subspaces.

    Attributes:
        basis: ``w x m`` orthonormal matrix, ``m`` may be 0.
        g_eigenvalues: Eigenvalue of ``G = P + Q`` paired with each basis vector, ascending.
        overlap_dim: Number of canonical directions treated as shared (zero angle).
        source_dims: Dimensions ``(N_P, N_Q)`` of the two source subspaces.
    """

    basis: np.ndarray
    g_eigenvalues: np.ndarray
    overlap_dim: int = Field(ge=0)
    source_dims: Tuple[int, int]

    @field_validator("basis", "g_eigenvalues", mode="before")
    @classmethod
    def _freeze(cls, value: Any) -> FloatArray:
        return readonly(value)

    @model_validator(mode="after")
    def _check_shapes(self) -> "DifferenceSubspace":
        if self.basis.ndim != 2:
            raise ValueError("basis must be a w x m matrix")
        if self.g_eigenvalues.shape != (self.basis.shape[1],):
            raise ValueError("one G-eigenvalue per basis vector is required")
        return self

    @property
    def ambient_dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    @property
    def is_empty(self) -> bool:
        return self.dim == 0

    def leading(self, count: int) -> "DifferenceSubspace":
        """Keep the ``count`` directions with the largest G-eigenvalues (the most different ones)."""
        if count >= self.dim:
            return self
        keep = slice(self.dim - count, self.dim)
        return DifferenceSubspace(
            basis=self.basis[:, keep],
            g_eigenvalues=self.g_eigenvalues[keep],
            overlap_dim=self.overlap_dim,
            source_dims=self.source_dims,
        )


class ScorePoint(BaseModel):
    """A change degree aligned to a 1-based sample index."""

    model_config = ConfigDict(frozen=True)

    time_index: int
    degree: float = Field(ge=0.0)
    flag: Optional[bool] = None


class ScoreSeries(BaseModel):
    """Scores in increasing time order. Samples without a score are simply absent."""

    model_config = ConfigDict(frozen=True)

    points: List[ScorePoint]

    @model_validator(mode="after")
    def _check_order(self) -> "ScoreSeries":
        indices = [point.time_index for point in self.points]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("time_index values must be strictly increasing")
        return self

    def __len__(self) -> int:
        return len(self.points)

    @property
    def time_indices(self) -> npt.NDArray[np.int64]:
        return np.array([point.time_index for point in self.points], dtype=np.int64)

    @property
    def degrees(self) -> FloatArray:
        return np.array([point.degree for point in self.points], dtype=np.float64)


class TrainedModel(_ArrayModel):
    """Result of training the difference-subspace detector on normal data.

    Attributes:
        reference_ds: Non-anomalous difference subspace ``D_N``.
        reference_magnitude: Mean magnitude ``mu(D_N)`` over the training windows.
        threshold: Mean of ``training_degrees``; degrees above it are flagged.
        training_degrees: Change degrees of the training windows.
        config: Configuration that produced the model.
        training_window_count: Number ``L`` of training window positions.
    """

    reference_ds: Subspace
    reference_magnitude: float
    threshold: float
    training_degrees: np.ndarray
    config: DetectorConfig
    training_window_count: int = Field(ge=1)

    @field_validator("training_degrees", mode="before")
    @classmethod
    def _freeze(cls, value: Any) -> FloatArray:
        return readonly(value)

    @model_validator(mode="after")
    def _check_reference(self) -> "TrainedModel":
        if self.reference_ds.dim > self.config.nor_dims:
            raise ValueError(
                f"reference_ds has {self.reference_ds.dim} dims, more than nor_dims={self.config.nor_dims}"
            )
        if self.reference_ds.ambient_dim != self.config.w:
            raise ValueError("reference_ds ambient dimension must equal w")
        return self


class ARModel(BaseModel):
    """Autoregressive predictor ``h(t) - mean = sum_i a_i * (h(t-i) - mean) + e(t)``.

    Attributes:
        order: ``p >= 0``.
        coefficients: ``a_1 .. a_p``.
        noise_variance: Innovation variance estimate, > 0.
        aic: Akaike information criterion of the fit.
        mean: Sample mean removed before fitting.
        aic_curve: AIC of every candidate order ``0 .. max_order``.
    """

    model_config = ConfigDict(frozen=True)

    order: int = Field(ge=0)
    coefficients: Tuple[float, ...]
    noise_variance: float = Field(gt=0.0)
    aic: float
    mean: float = 0.0
    aic_curve: Tuple[float, ...] = ()

    @model_validator(mode="after")
    def _check_order(self) -> "ARModel":
        if len(self.coefficients) != self.order:
            raise ValueError(f"expected {self.order} coefficients, got {len(self.coefficients)}")
        return self


class Dataset(BaseModel):
    """A labelled series and its train/test split.

    Attributes:
        series: The full labelled series.
        split: ``(train_len, test_len)``; the training prefix must be anomaly free.
    """

    model_config = ConfigDict(frozen=True)

    series: TimeSeries
    split: Tuple[int, int]

    @model_validator(mode="after")
    def _check_split(self) -> "Dataset":
        train_len, test_len = self.split
        if self.series.labels is None:
            raise ValueError("a dataset needs a labelled series")
        if train_len < 1 or test_len < 1:
            raise ValueError("train and test portions must be non-empty")
        if train_len + test_len > len(self.series):
            raise ValueError(f"train_len + test_len = {train_len + test_len} exceeds series length {len(self.series)}")
        if np.any(self.series.labels[:train_len] == 1):
            raise ValueError("the training prefix contains anomalous samples")
        return self

    @property
    def train(self) -> TimeSeries:
        return self.series.slice(0, self.split[0], name=f"{self.series.name}[train]")

    @property
    def test(self) -> TimeSeries:
        train_len, test_len = self.split
        return self.series.slice(train_len, train_len + test_len, name=f"{self.series.name}[test]")

    @classmethod
    def from_series(cls, series: TimeSeries, split: Optional[Tuple[int, int]] = None) -> "Dataset":
        """Build a dataset with an explicit split, the known split of a UCR series, or a 30/70 split.

        A UCR series is recognised by its name (e.g. ``chfdb_chf01_275_1``); the default split
        trains on ``round(0.3 * n)`` samples (halves up) and tests on the rest.
        """
        if split is None:
            split = UCR_SPLITS.get(series.name)
        if split is None:
            train_len = round_half_up(0.3 * len(series))
            split = (train_len, len(series) - train_len)
        return cls(series=series, split=split)


class SweepRow(BaseModel):
    """One evaluated grid cell. ``auc`` is None when the cell failed."""

    model_config = ConfigDict(frozen=True)

    method: Method
    params: Dict[str, Any]
    auc: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    seconds: float = Field(ge=0.0)
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.auc is None


class SweepReport(BaseModel):
    """Rows of a sweep plus the best cell per method."""

    model_config = ConfigDict(frozen=True)

    rows: List[SweepRow]

    @property
    def best_per_method(self) -> Dict[Method, Tuple[Dict[str, Any], float]]:
        """Method to ``(params, auc)`` of its best successful row (first row wins ties)."""
        best: Dict[Method, Tuple[Dict[str, Any], float]] = {}
        for row in self.rows:
            if row.auc is None:
                continue
            current = best.get(row.method)
            if current is None or row.auc > current[1]:
                best[row.method] = (row.params, row.auc)
        return best

    def best_by(self, param: str) -> Dict[Method, Dict[Any, float]]:
        """Best AUC per method for every value of ``param`` (e.g. the AUC vs ov_rate curve)."""
        curves: Dict[Method, Dict[Any, float]] = {}
        for row in self.rows:
            if row.auc is None or param not in row.params:
                continue
            curve = curves.setdefault(row.method, {})
            value = row.params[param]
            curve[value] = max(curve.get(value, row.auc), row.auc)
        return curves

    def merged(self, other: "SweepReport") -> "SweepReport":
        return SweepReport(rows=[*self.rows, *other.rows])


class EmbeddingExport(_ArrayModel):
    """Low-dimensional coordinates of a set of subspaces.

    Attributes:
        coordinates: ``n x k`` coordinates, ``k <= 3``.
        labels: Class of each point (0 normal, 1 anomalous).
        time_indices: Sample index each point was taken at.
        stress: Relative Frobenius error between input and embedded distances.
        eigenvalues: Eigenvalues of the double-centred matrix, descending.
        warning: Set when fewer axes than requested had positive eigenvalues.
    """

    coordinates: np.ndarray
    labels: np.ndarray
    time_indices: np.ndarray
    stress: float = Field(ge=0.0)
    eigenvalues: np.ndarray
    warning: Optional[str] = None

    @model_validator(mode="after")
    def _check_counts(self) -> "EmbeddingExport":
        count = self.coordinates.shape[0]
        if self.labels.shape != (count,) or self.time_indices.shape != (count,):
            raise ValueError("one label and one time index per embedded point are required")
        return self

    def __len__(self) -> int:
        return int(self.coordinates.shape[0])
