"""Reading and writing series, scores, models, reports and embeddings; synthetic data generation.

Every float is written with 17 significant digits, so files reproduce float64 values exactly.
"""

import logging
from io import StringIO
from pathlib import Path
from typing import (
    Dict,
    List,
    Optional,
    Tuple,
    Union,
)

import numpy as np
import pandas as pd
from scipy import signal

from .config import (
    AR2Segment,
    DetectorConfig,
    NoiseSegment,
    SineSegment,
    SyntheticSpec,
    read_key_values,
)
from .errors import (
    ParameterError,
    ParseError,
)
from .types import (
    EmbeddingExport,
    FloatArray,
    ScoreSeries,
    Subspace,
    SweepReport,
    TimeSeries,
    TrainedModel,
)
from .utils import (
    FLOAT_FORMAT,
    format_float,
    read_text,
)


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

PARAMETER_COLUMNS = ["w", "M", "tau", "ov_rate", "r", "nor_dims", "c", "delta_floor"]

# max_order (AR rows) and error (failed cells) trail the fixed layout
REPORT_COLUMNS = ["method", *PARAMETER_COLUMNS, "auc", "seconds", "max_order", "error"]


def _parse_float(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric token {token!r}", line=line)
    if not np.isfinite(value):
        raise ParseError(f"non-finite value {token!r}", line=line)
    return value


def _read_table(path: Path, delimiter: Optional[str], skip_rows: int) -> Tuple[pd.DataFrame, List[int]]:
    """Split a delimited text file into string cells. Returns the non-blank rows and their 1-based line numbers."""
    text = read_text(path)
    if delimiter is None:
        first = next((line for line in text.splitlines()[skip_rows:] if line.strip()), "")
        delimiter = "," if "," in first else r"\s+"
    try:
        frame = pd.read_csv(
            StringIO(text),
            sep=delimiter,
            header=None,
            dtype=str,
            skiprows=skip_rows,
            skip_blank_lines=False,
            na_filter=False,
            engine="python",
        )
    except pd.errors.EmptyDataError:
        raise ParseError(f"{path} holds no samples")
    except pd.errors.ParserError as e:
        raise ParseError(f"malformed row in {path}: {e}")

    # rows shorter than the widest one are padded with NaN
    frame = frame.fillna("")

    line_numbers = [skip_rows + i + 1 for i in range(len(frame))]
    blank = frame.apply(lambda row: all(cell.strip() == "" for cell in row), axis=1)
    frame = frame[~blank.to_numpy()]
    line_numbers = [line for line, is_blank in zip(line_numbers, blank) if not is_blank]
    if frame.empty:
        raise ParseError(f"{path} holds no samples")
    return frame, line_numbers


def _parse_column(frame: pd.DataFrame, column: int, line_numbers: List[int]) -> FloatArray:
    if column >= frame.shape[1]:
        raise ParseError(f"column {column} does not exist (the file has {frame.shape[1]} columns)")
    values = []
    for token, line in zip(frame.iloc[:, column], line_numbers):
        token = token.strip()
        if not token:
            raise ParseError(f"missing value in column {column}", line=line)
        values.append(_parse_float(token, line))
    return np.array(values, dtype=np.float64)


def _is_binary(frame: pd.DataFrame, column: int) -> bool:
    tokens = frame.iloc[:, column].str.strip()
    try:
        values = tokens.astype(float)
    except ValueError:
        return False
    return bool(values.isin((0.0, 1.0)).all())


def load_series(
    path: PathLike,
    column: Optional[int] = None,
    labels_column: Optional[int] = None,
    delimiter: Optional[str] = None,
    skip_rows: int = 0,
    name: Optional[str] = None,
) -> TimeSeries:
    """Load a series from plain text (one sample per line) or delimiter-separated columns.

    Without an explicit ``labels_column``, a file with exactly two columns whose second column
    is {0, 1}-valued is read as ``value,label``.

    Args:
        path: Input file.
        column: 0-based column of the samples. Defaults to the first column.
        labels_column: 0-based column of 0/1 anomaly labels.
        delimiter: Column separator. Defaults to ``,`` when the first data line holds one,
                   otherwise whitespace.
        skip_rows: Number of leading header lines to ignore.
        name: Series name. Defaults to the file stem.

    Raises:
        FileNotFoundError: If the file doesn't exist.
        ParseError: On a non-numeric token, a NaN/Inf value or a label outside {0, 1}; the
                    message names the line.
    """
    series_path = Path(path)
    if not series_path.exists():
        raise FileNotFoundError(f"Series file not found: {series_path}")

    frame, line_numbers = _read_table(series_path, delimiter, skip_rows)
    value_column = 0 if column is None else column
    samples = _parse_column(frame, value_column, line_numbers)

    if labels_column is None and column is None and frame.shape[1] == 2 and _is_binary(frame, 1):
        labels_column = 1

    labels = None
    if labels_column is not None:
        raw = _parse_column(frame, labels_column, line_numbers)
        bad = np.flatnonzero(~np.isin(raw, (0.0, 1.0)))
        if bad.size:
            raise ParseError(f"label {raw[bad[0]]!r} is not 0 or 1", line=line_numbers[bad[0]])
        labels = raw.astype(np.int8)

    series = TimeSeries(samples=samples, labels=labels, name=name or series_path.stem)
    logger.debug(
        "Loaded %d samples from %s (labels: %s)", len(series), series_path, "yes" if labels is not None else "no"
    )
    return series


def write_series(series: TimeSeries, path: PathLike) -> None:
    """Write ``value`` rows, or ``value,label`` rows for a labelled series."""
    columns: Dict[str, np.ndarray] = {"value": series.samples}
    if series.labels is not None:
        columns["label"] = series.labels
    pd.DataFrame(columns).to_csv(path, header=False, index=False, float_format=FLOAT_FORMAT)


def _assert_stable(segment: AR2Segment) -> None:
    roots = np.roots([1.0, -segment.a1, -segment.a2])
    if np.any(np.abs(roots) >= 1.0):
        raise ParameterError(
            f"AR(2) parameters a1={segment.a1}, a2={segment.a2} are not stationary "
            f"(characteristic roots must satisfy |z| < 1, got max |z| = {np.abs(roots).max():.6g})"
        )


def generate_synthetic(spec: SyntheticSpec) -> TimeSeries:
    """Generate a labelled series from consecutive segments.

    Generators, with ``n`` the 1-based sample index over the whole series:

    - sine: ``amp * sin(2*pi*freq*n + phase)`` plus ``N(0, sigma^2)`` noise when ``sigma > 0``
    - ar2: ``h(n) = a1*h(n-1) + a2*h(n-2) + N(0, sigma^2)`` from a zero initial state
    - noise: ``N(0, sigma^2)``

    A single random generator seeded with ``spec.seed`` is consumed segment by segment. Samples
    with 0-based index in ``[b - half_width, b + half_width]`` around every boundary ``b`` are
    labelled 1.

    Raises:
        ParameterError: If an AR(2) segment is not stationary.

    Examples:
        >>> spec = SyntheticSpec.model_validate({"segments": [{"kind": "sine", "length": 100, "freq": 0.05}]})
        >>> abs(generate_synthetic(spec).samples[9]) < 1e-12
        True
    """
    rng = np.random.default_rng(spec.seed)
    pieces = []
    start = 0
    for segment in spec.segments:
        if isinstance(segment, SineSegment):
            n = np.arange(start + 1, start + segment.length + 1, dtype=np.float64)
            piece = segment.amp * np.sin(2.0 * np.pi * segment.freq * n + segment.phase)
            if segment.sigma > 0.0:
                piece = piece + rng.normal(0.0, segment.sigma, segment.length)
        elif isinstance(segment, AR2Segment):
            _assert_stable(segment)
            innovations = rng.normal(0.0, segment.sigma, segment.length)
            piece = signal.lfilter([1.0], [1.0, -segment.a1, -segment.a2], innovations)
        elif isinstance(segment, NoiseSegment):
            piece = rng.normal(0.0, segment.sigma, segment.length)
        else:
            raise ParameterError(f"unknown segment kind {segment!r}")
        pieces.append(piece)
        start += segment.length

    samples = np.concatenate(pieces)
    labels = np.zeros(samples.size, dtype=np.int8)
    half = spec.label_half_width
    for boundary in spec.boundaries:
        labels[max(0, boundary - half) : min(samples.size, boundary + half + 1)] = 1

    logger.info(
        "Generated %s: %d samples, %d segments, %d labelled samples",
        spec.name,
        samples.size,
        len(spec.segments),
        int(labels.sum()),
    )
    return TimeSeries(samples=samples, labels=labels, name=spec.name)


def write_scores(scores: ScoreSeries, path: PathLike) -> None:
    """Write ``time_index,degree,flag`` rows with a header. ``flag`` is 0/1, or empty when unset."""
    frame = pd.DataFrame(
        {
            "time_index": scores.time_indices,
            "degree": scores.degrees,
            "flag": ["" if point.flag is None else int(point.flag) for point in scores.points],
        }
    )
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)


# Model files: "[section]" headers followed by their payload lines.
def _format_row(values: np.ndarray) -> str:
    return ",".join(format_float(float(value)) for value in values)


def save_model(model: TrainedModel, path: PathLike) -> None:
    """Write a trained model as sectioned text. :func:`load_model` restores it exactly."""
    basis = model.reference_ds.basis
    lines = ["[config]"]
    lines += [f"{key} = {value}" for key, value in model.config.to_key_values().items()]
    lines += ["", "[reference_ds]", f"{basis.shape[0]} {basis.shape[1]}"]
    lines += [_format_row(row) for row in basis]
    lines += ["", "[reference_spectrum]", _format_row(model.reference_ds.spectrum)]
    lines += ["", "[reference_magnitude]", format_float(model.reference_magnitude)]
    lines += ["", "[threshold]", format_float(model.threshold)]
    lines += ["", "[training_degrees]"]
    lines += [format_float(float(degree)) for degree in model.training_degrees]
    lines += ["", "[training_window_count]", str(model.training_window_count)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info("Saved model to %s", path)


def _split_sections(text: str) -> Dict[str, List[Tuple[int, str]]]:
    sections: Dict[str, List[Tuple[int, str]]] = {}
    current: Optional[List[Tuple[int, str]]] = None
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name in sections:
                raise ParseError(f"duplicate section [{name}]", line=line_number)
            current = sections[name] = []
        elif current is None:
            raise ParseError("content before the first section header", line=line_number)
        else:
            current.append((line_number, line))
    return sections


def _section(sections: Dict[str, List[Tuple[int, str]]], name: str) -> List[Tuple[int, str]]:
    if name not in sections:
        raise ParseError(f"model file lacks the [{name}] section")
    return sections[name]


def _single_value(sections: Dict[str, List[Tuple[int, str]]], name: str) -> Tuple[int, str]:
    lines = _section(sections, name)
    if len(lines) != 1:
        raise ParseError(f"[{name}] must hold exactly one value", line=lines[0][0] if lines else None)
    return lines[0]


def _parse_row(line_number: int, line: str, width: int) -> List[float]:
    values = [_parse_float(token.strip(), line_number) for token in line.split(",")]
    if len(values) != width:
        raise ParseError(f"expected {width} values, got {len(values)}", line=line_number)
    return values


def load_model(path: PathLike) -> TrainedModel:
    """Read a model written by :func:`save_model`.

    Raises:
        FileNotFoundError: If the file doesn't exist.
        ParseError: If a section is missing or malformed.
        pydantic.ValidationError: If the stored values don't form a valid model.
    """
    model_path = Path(path)
    if not model_path.exists():
        raise FileNotFoundError(f"Model file not found: {model_path}")
    sections = _split_sections(read_text(model_path))

    config_lines = _section(sections, "config")
    config = DetectorConfig.model_validate(read_key_values("\n".join(line for _, line in config_lines)))

    basis_lines = _section(sections, "reference_ds")
    if not basis_lines:
        raise ParseError("[reference_ds] lacks its shape line")
    shape_line, shape_text = basis_lines[0]
    try:
        rows, cols = (int(token) for token in shape_text.split())
    except ValueError:
        raise ParseError(f"expected '<rows> <columns>', got {shape_text!r}", line=shape_line)
    if len(basis_lines) - 1 != rows:
        raise ParseError(f"[reference_ds] declares {rows} rows, found {len(basis_lines) - 1}", line=shape_line)
    basis = np.array([_parse_row(n, line, cols) for n, line in basis_lines[1:]], dtype=np.float64)

    spectrum_line, spectrum_text = _single_value(sections, "reference_spectrum")
    spectrum = np.array(_parse_row(spectrum_line, spectrum_text, cols), dtype=np.float64)

    magnitude_line, magnitude_text = _single_value(sections, "reference_magnitude")
    threshold_line, threshold_text = _single_value(sections, "threshold")
    degrees = [_parse_float(line, n) for n, line in _section(sections, "training_degrees")]
    count_line, count_text = _single_value(sections, "training_window_count")
    try:
        count = int(count_text)
    except ValueError:
        raise ParseError(f"non-integer window count {count_text!r}", line=count_line)

    model = TrainedModel(
        reference_ds=Subspace(basis=basis, spectrum=spectrum),
        reference_magnitude=_parse_float(magnitude_text, magnitude_line),
        threshold=_parse_float(threshold_text, threshold_line),
        training_degrees=np.array(degrees, dtype=np.float64),
        config=config,
        training_window_count=count,
    )
    logger.debug("Loaded model from %s (reference dims=%d)", model_path, model.reference_ds.dim)
    return model


def report_frame(report: SweepReport) -> pd.DataFrame:
    """One row per sweep cell in ``REPORT_COLUMNS`` order; ``max_order`` and ``error`` come last."""
    records = []
    for row in report.rows:
        record = {"method": row.method.value}
        record.update({column: row.params.get(column) for column in PARAMETER_COLUMNS})
        record.update({"auc": row.auc, "seconds": row.seconds})
        record.update({"max_order": row.params.get("max_order"), "error": row.error or ""})
        records.append(record)
    return pd.DataFrame.from_records(records, columns=REPORT_COLUMNS)


def write_report(report: SweepReport, path: PathLike) -> None:
    report_frame(report).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info("Wrote %d sweep rows to %s", len(report.rows), path)


def write_embedding(embedding: EmbeddingExport, path: PathLike) -> None:
    """Write ``x,y,z,label,time_index`` rows. Missing axes are written as 0."""
    coordinates = np.zeros((len(embedding), 3))
    axes = min(3, embedding.coordinates.shape[1])
    coordinates[:, :axes] = embedding.coordinates[:, :axes]
    frame = pd.DataFrame(
        {
            "x": coordinates[:, 0],
            "y": coordinates[:, 1],
            "z": coordinates[:, 2],
            "label": embedding.labels.astype(int),
            "time_index": embedding.time_indices.astype(int),
        }
    )
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
