"""Configuration models for ssa_diffspace."""

import itertools
import json
import logging
from enum import Enum
from pathlib import Path
from typing import (
    Annotated,
    Any,
    Dict,
    List,
    Literal,
    Optional,
    Union,
)

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    model_validator,
)

from .errors import ParseError
from .utils import (
    read_text,
    round_half_up,
)


logger = logging.getLogger(__name__)


class Method(str, Enum):
    """Scoring methods known to the evaluation harness."""

    DS = "ds"
    SSA1 = "ssa1"
    SSA5 = "ssa5"
    SSAALL = "ssaall"
    AR = "ar"

    @property
    def angle_count(self) -> Optional[int]:
        """Number of smallest canonical angles averaged by an SSA baseline (None means all)."""
        return {Method.SSA1: 1, Method.SSA5: 5}.get(self)

    @property
    def is_ssa_baseline(self) -> bool:
        return self in (Method.SSA1, Method.SSA5, Method.SSAALL)


class DistanceMetric(str, Enum):
    """Distance between two subspaces used for the embedding view.

    ``eq4`` is the mean ``1 - cos`` over the ``c`` smallest canonical angles; ``dissimilarity``
    is accepted as another name for it.
    """

    MIN_ANGLE = "min-angle"
    DISSIMILARITY = "eq4"

    @classmethod
    def _missing_(cls, value: object) -> Optional["DistanceMetric"]:
        if value == "dissimilarity":
            return cls.DISSIMILARITY
        return None

    @classmethod
    def choices(cls) -> List[str]:
        """Every accepted spelling, aliases included."""
        return [metric.value for metric in cls] + ["dissimilarity"]


class RankRule(BaseModel):
    """How many leading singular directions form a signal subspace.

    Attributes:
        kind: ``"fixed"`` keeps exactly ``value`` directions; ``"energy"`` keeps the smallest number
              of directions whose cumulative share of the spectrum reaches ``value``.
        value: Rank (fixed) or energy fraction in (0, 1] (energy).

    Examples:
        >>> RankRule.fixed(30)
        RankRule(kind='fixed', value=30.0)
        >>> RankRule.model_validate("energy:0.95").kind
        'energy'
        >>> RankRule.model_validate(5).rank
        5
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["fixed", "energy"]
    value: float

    @classmethod
    def fixed(cls, rank: int) -> "RankRule":
        return cls(kind="fixed", value=rank)

    @classmethod
    def energy(cls, fraction: float) -> "RankRule":
        return cls(kind="energy", value=fraction)

    @model_validator(mode="before")
    @classmethod
    def _coerce(cls, data: Any) -> Any:
        if isinstance(data, bool):
            raise ValueError("sig_dims must be an integer rank or 'energy:<fraction>'")
        if isinstance(data, int):
            return {"kind": "fixed", "value": data}
        if isinstance(data, float):
            if data.is_integer() and data >= 1:
                return {"kind": "fixed", "value": data}
            return {"kind": "energy", "value": data}
        if isinstance(data, str):
            text = data.strip().lower()
            if text.startswith("energy"):
                fraction = text[len("energy") :].lstrip(":").strip().strip("()")
                return {"kind": "energy", "value": fraction}
            return {"kind": "fixed", "value": text}
        return data

    @model_validator(mode="after")
    def _check_range(self) -> "RankRule":
        if self.kind == "fixed":
            if not self.value.is_integer() or self.value < 1:
                raise ValueError(f"fixed rank must be an integer >= 1, got {self.value}")
        elif not 0.0 < self.value <= 1.0:
            raise ValueError(f"energy fraction must satisfy 0 < fraction <= 1, got {self.value}")
        return self

    @property
    def rank(self) -> int:
        """The fixed rank. Only meaningful for ``kind == "fixed"``."""
        if self.kind != "fixed":
            raise ValueError("energy rank rules have no fixed rank")
        return int(self.value)

    def __str__(self) -> str:
        if self.kind == "fixed":
            return str(self.rank)
        return f"energy:{self.value!r}"


class DetectorConfig(BaseModel):
    """Parameters of the difference-subspace detector and the SSA baselines.

    Attributes:
        w: Width of a sliding window (rows of a trajectory matrix, ambient dimension).
        M: Number of sliding windows (columns of a trajectory matrix).
        tau: Time lag between past and present segments, in samples.
        ov_rate: Overlap fraction of past and present segments; converted to ``tau``.
                 Exactly one of ``tau`` and ``ov_rate`` must be given.
        sig_dims: Signal-subspace rank rule.
        delta_floor: G-eigenvalues at or below this value count as overlap, not difference.
        nor_dims: Dimension cap of the non-anomalous difference subspace.
        c: Number of smallest canonical angles averaged by the direction dissimilarity.
        stride: Step between consecutive window positions, in samples.
        workers: Threads used to evaluate window positions. Never changes results.

    Examples:
        >>> config = DetectorConfig(w=128, M=128, ov_rate=0.7)
        >>> config.lag, config.t_c
        (77, 167)
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    w: int = Field(ge=2)
    M: int = Field(ge=2)
    tau: Optional[int] = Field(default=None, ge=1)
    ov_rate: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    sig_dims: RankRule = Field(default_factory=lambda: RankRule.fixed(30))
    delta_floor: float = Field(default=1e-6, gt=0.0, lt=1.0)
    nor_dims: int = Field(default=90, ge=1)
    c: int = Field(default=5, ge=1)
    stride: int = Field(default=1, ge=1)
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_consistency(self) -> "DetectorConfig":
        if (self.tau is None) == (self.ov_rate is None):
            raise ValueError("exactly one of tau and ov_rate must be supplied")
        if self.lag >= self.w + self.M - 1:
            raise ValueError(f"tau must satisfy tau < w + M - 1 = {self.w + self.M - 1}, got {self.lag}")
        if self.sig_dims.kind == "fixed" and self.sig_dims.rank > min(self.w, self.M):
            raise ValueError(f"sig_dims must satisfy r <= min(w, M) = {min(self.w, self.M)}, got {self.sig_dims.rank}")
        return self

    @property
    def lag(self) -> int:
        """The effective time lag ``tau`` in samples."""
        if self.tau is not None:
            return self.tau
        from .detector import tau_from_overlap

        return tau_from_overlap(self.w, self.M, self.ov_rate)  # type: ignore[arg-type]

    @property
    def t_c(self) -> int:
        """Offset from the last covered sample to the centre of a window pair."""
        return round_half_up((self.w + self.M + self.lag) / 2)

    @property
    def first_position(self) -> int:
        """Smallest 1-based sample index at which a full window pair fits."""
        return self.w + self.M + self.lag - 1

    def to_key_values(self) -> Dict[str, str]:
        """Flatten to the ``key = value`` representation used by config and model files."""
        values = {
            "w": str(self.w),
            "M": str(self.M),
            "sig_dims": str(self.sig_dims),
            "delta_floor": repr(self.delta_floor),
            "nor_dims": str(self.nor_dims),
            "c": str(self.c),
            "stride": str(self.stride),
            "workers": str(self.workers),
        }
        if self.tau is not None:
            values["tau"] = str(self.tau)
        else:
            values["ov_rate"] = repr(self.ov_rate)
        return values


class SineSegment(BaseModel):
    """``amp * sin(2*pi*freq*n + phase)`` plus optional Gaussian noise, over the global sample index ``n``."""

    kind: Literal["sine"] = "sine"
    length: int = Field(ge=1)
    freq: float
    amp: float = 1.0
    phase: float = 0.0
    sigma: float = Field(default=0.0, ge=0.0)


class AR2Segment(BaseModel):
    """``h(n) = a1*h(n-1) + a2*h(n-2) + N(0, sigma^2)`` started from a zero state."""

    kind: Literal["ar2"] = "ar2"
    length: int = Field(ge=1)
    a1: float
    a2: float
    sigma: float = Field(default=1.0, ge=0.0)


class NoiseSegment(BaseModel):
    """White Gaussian noise ``N(0, sigma^2)``."""

    kind: Literal["noise"] = "noise"
    length: int = Field(ge=1)
    sigma: float = Field(default=1.0, ge=0.0)


Segment = Annotated[Union[SineSegment, AR2Segment, NoiseSegment], Field(discriminator="kind")]


class SyntheticSpec(BaseModel):
    """Recipe for a labelled synthetic series built from consecutive segments.

    Attributes:
        segments: Generators in order; their lengths add up to the series length.
        seed: Seed of the random generator shared by all segments.
        label_half_width: Samples within this distance of a segment boundary are labelled 1.
        name: Name given to the generated series.

    Examples:
        >>> spec = SyntheticSpec.model_validate({
        ...     "seed": 7,
        ...     "label_half_width": 32,
        ...     "segments": [
        ...         {"kind": "ar2", "length": 500, "a1": 0.75, "a2": -0.5},
        ...         {"kind": "sine", "length": 500, "freq": 0.1},
        ...     ],
        ... })
    """

    segments: List[Segment] = Field(min_length=1)
    seed: int = 0
    label_half_width: int = Field(default=0, ge=0)
    name: str = "synthetic"

    @property
    def boundaries(self) -> List[int]:
        """0-based indices where a new segment starts (the first segment excluded)."""
        return list(itertools.accumulate(segment.length for segment in self.segments))[:-1]


class SweepGrid(BaseModel):
    """Parameter grid for a sweep.

    Attributes:
        base: Parameter values shared by every cell (DetectorConfig fields and ``max_order``).
        grid: Parameter name to the list of values to try; cells are the cartesian product
              in key order.

    A JSON file holding only a mapping of lists is read as ``grid`` with an empty ``base``.

    Examples:
        >>> grid = SweepGrid.model_validate({"w": [64, 128], "M": [64], "ov_rate": [0.5, 0.7]})
        >>> len(grid.cells())
        4
    """

    base: Dict[str, Any] = Field(default_factory=dict)
    grid: Dict[str, List[Any]]

    @model_validator(mode="before")
    @classmethod
    def _bare_mapping(cls, data: Any) -> Any:
        if isinstance(data, dict) and "grid" not in data:
            return {"base": {}, "grid": data}
        return data

    @model_validator(mode="after")
    def _non_empty(self) -> "SweepGrid":
        if not self.grid:
            raise ValueError("grid must name at least one parameter")
        empty = [name for name, values in self.grid.items() if not values]
        if empty:
            raise ValueError(f"grid parameters without values: {', '.join(empty)}")
        return self

    def cells(self) -> List[Dict[str, Any]]:
        """Every parameter assignment of the grid, merged over ``base``, in a deterministic order."""
        names = list(self.grid)
        return [{**self.base, **dict(zip(names, values))} for values in itertools.product(*self.grid.values())]


def read_key_values(text: str) -> Dict[str, str]:
    """Parse flat ``key = value`` text. Blank lines and ``#`` comments are ignored.

    Raises:
        ParseError: If a line has no ``=`` or repeats a key.
    """
    values: Dict[str, str] = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", line=line_number)
        key = key.strip()
        if key in values:
            raise ParseError(f"duplicate key {key!r}", line=line_number)
        values[key] = value.strip()
    return values


def load_config(path: Union[str, Path]) -> DetectorConfig:
    """Load a DetectorConfig from a ``key = value`` text file or a ``.json`` file.

    Raises:
        FileNotFoundError: If the file doesn't exist.
        ParseError: If the file is not valid key/value text or JSON.
        pydantic.ValidationError: If the values don't satisfy DetectorConfig.
    """
    config_path = Path(path)
    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    text = read_text(config_path)
    if config_path.suffix.lower() == ".json":
        try:
            data: Dict[str, Any] = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno)
    else:
        data = dict(read_key_values(text))

    config = DetectorConfig.model_validate(data)
    logger.debug("Loaded configuration from %s: %s", config_path, config)
    return config


def load_json_model(path: Union[str, Path], model: Any) -> Any:
    """Read a JSON file and validate it into ``model`` (a pydantic model class)."""
    json_path = Path(path)
    if not json_path.exists():
        raise FileNotFoundError(f"File not found: {json_path}")
    try:
        data = json.loads(read_text(json_path))
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno)
    return model.model_validate(data)
