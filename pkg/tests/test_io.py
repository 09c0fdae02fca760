"""Tests for series, score, model, report and embedding files and synthetic data."""

from pathlib import Path
from typing import Callable

import numpy as np
import pandas as pd
import pytest

from ssa_diffspace.config import (
    DetectorConfig,
    Method,
    SyntheticSpec,
)
from ssa_diffspace.detector import (
    detect,
    train,
)
from ssa_diffspace.errors import (
    ParameterError,
    ParseError,
)
from ssa_diffspace.evaluation import mds_embed
from ssa_diffspace.io import (
    REPORT_COLUMNS,
    generate_synthetic,
    load_model,
    load_series,
    save_model,
    write_embedding,
    write_report,
    write_scores,
    write_series,
)
from ssa_diffspace.types import (
    SweepReport,
    SweepRow,
    TimeSeries,
)


TextFile = Callable[..., Path]


class TestLoadSeries:
    """Tests for load_series."""

    def test_one_sample_per_line(self, text_file: TextFile) -> None:
        """Test a plain column of numbers."""
        path = text_file("1.0\n2.5\n-3\n1e-3\n")

        series = load_series(path)

        assert series.samples.tolist() == [1.0, 2.5, -3.0, 0.001]
        assert series.labels is None
        assert series.name == path.stem

    def test_value_label_columns_are_detected(self, text_file: TextFile) -> None:
        """Test that a second 0/1 column is read as labels."""
        series = load_series(text_file("0.5,0\n0.7,1\n0.1,0\n", suffix=".csv"))

        assert series.samples.tolist() == [0.5, 0.7, 0.1]
        assert series.labels.tolist() == [0, 1, 0]

    def test_non_binary_second_column_is_not_labels(self, text_file: TextFile) -> None:
        """Test that a numeric second column stays unused unless requested."""
        path = text_file("1 10\n2 20\n3 30\n")

        assert load_series(path).labels is None
        assert load_series(path, column=1).samples.tolist() == [10.0, 20.0, 30.0]

    def test_header_and_blank_lines(self, text_file: TextFile) -> None:
        """Test skipped header rows and ignored blank lines."""
        series = load_series(text_file("time;value\n1;4.0\n\n2;5.0\n"), column=1, delimiter=";", skip_rows=1)

        assert series.samples.tolist() == [4.0, 5.0]

    def test_non_numeric_token_names_the_line(self, text_file: TextFile) -> None:
        """Test that a bad token is reported with its 1-based line number."""
        path = text_file("1\n2\n3\n4\n5\n6\nabc\n8\n")

        with pytest.raises(ParseError) as exc_info:
            load_series(path)

        assert exc_info.value.line == 7
        assert "line 7" in str(exc_info.value)

    def test_invalid_utf8_names_the_line(self, tmp_path: Path) -> None:
        """Test that undecodable bytes are a parse error on the line holding them."""
        path = tmp_path / "latin.txt"
        path.write_bytes(b"1.0\n2.0\n\xff\xfe\n3.0\n")

        with pytest.raises(ParseError) as exc_info:
            load_series(path)

        assert exc_info.value.line == 3
        assert "not valid UTF-8" in str(exc_info.value)

    @pytest.mark.parametrize("token", ["nan", "inf", "-Infinity"])
    def test_non_finite_values_raise(self, text_file: TextFile, token: str) -> None:
        """Test that NaN and infinite samples are rejected."""
        with pytest.raises(ParseError) as exc_info:
            load_series(text_file(f"1.0\n{token}\n"))

        assert exc_info.value.line == 2

    def test_label_outside_zero_one_raises(self, text_file: TextFile) -> None:
        """Test an explicit labels column holding a 2."""
        path = text_file("1.0,0\n2.0,2\n")

        with pytest.raises(ParseError) as exc_info:
            load_series(path, labels_column=1)

        assert exc_info.value.line == 2

    def test_missing_column_raises(self, text_file: TextFile) -> None:
        """Test that asking for a column beyond the table is a parse error."""
        with pytest.raises(ParseError):
            load_series(text_file("1\n2\n"), column=3)

    def test_empty_file_raises(self, text_file: TextFile) -> None:
        """Test that a file without samples is a parse error."""
        with pytest.raises(ParseError):
            load_series(text_file(""))

    def test_missing_file_raises(self) -> None:
        """Test that a missing file is reported."""
        with pytest.raises(FileNotFoundError):
            load_series("/nonexistent/series.txt")

    def test_round_trip_is_exact(self, text_file: TextFile, rng: np.random.Generator) -> None:
        """Test that written samples read back bit for bit with their labels."""
        series = TimeSeries(samples=rng.standard_normal(50) * 1e3, labels=rng.integers(0, 2, 50))
        path = text_file("", suffix=".csv")

        write_series(series, path)
        loaded = load_series(path)

        assert np.array_equal(loaded.samples, series.samples)
        assert np.array_equal(loaded.labels, series.labels)


class TestGenerateSynthetic:
    """Tests for generate_synthetic."""

    def test_sine_uses_one_based_index(self) -> None:
        """Test that h(10) = sin(pi) for a 0.05 cycles-per-sample sine."""
        spec = SyntheticSpec.model_validate({"segments": [{"kind": "sine", "length": 100, "freq": 0.05}]})

        samples = generate_synthetic(spec).samples

        assert abs(samples[9]) < 1e-12
        assert samples[4] == pytest.approx(1.0)

    def test_labels_around_boundaries(self) -> None:
        """Test labels on 0-based samples b - h .. b + h around each boundary."""
        spec = SyntheticSpec.model_validate(
            {
                "seed": 7,
                "label_half_width": 32,
                "segments": [
                    {"kind": "ar2", "length": 500, "a1": 0.75, "a2": -0.5},
                    {"kind": "sine", "length": 500, "freq": 0.1},
                ],
            }
        )

        series = generate_synthetic(spec)

        assert len(series) == 1000
        assert np.flatnonzero(series.labels).tolist() == list(range(468, 533))

    def test_seeded_generation_is_reproducible(self) -> None:
        """Test identical output for equal seeds and different output otherwise."""
        segments = [{"kind": "noise", "length": 200}, {"kind": "ar2", "length": 200, "a1": 0.5, "a2": 0.2}]

        first = generate_synthetic(SyntheticSpec.model_validate({"seed": 1, "segments": segments}))
        second = generate_synthetic(SyntheticSpec.model_validate({"seed": 1, "segments": segments}))
        other = generate_synthetic(SyntheticSpec.model_validate({"seed": 2, "segments": segments}))

        assert np.array_equal(first.samples, second.samples)
        assert not np.array_equal(first.samples, other.samples)

    def test_noise_level(self) -> None:
        """Test the standard deviation of a long noise segment."""
        spec = SyntheticSpec.model_validate({"segments": [{"kind": "noise", "length": 20000, "sigma": 0.5}]})

        assert np.std(generate_synthetic(spec).samples) == pytest.approx(0.5, rel=0.05)

    def test_non_stationary_ar2_raises(self) -> None:
        """Test that explosive AR(2) parameters are refused."""
        spec = SyntheticSpec.model_validate({"segments": [{"kind": "ar2", "length": 100, "a1": 1.2, "a2": 0.3}]})

        with pytest.raises(ParameterError):
            generate_synthetic(spec)


class TestModelFiles:
    """Tests for save_model and load_model."""

    def test_round_trip_is_lossless(
        self, text_file: TextFile, noise_series: TimeSeries, small_config: DetectorConfig
    ) -> None:
        """Test that a saved model loads back with identical values and scores."""
        model = train(noise_series, small_config)
        path = text_file("", suffix=".model")

        save_model(model, path)
        loaded = load_model(path)

        assert loaded.config == model.config
        assert np.array_equal(loaded.reference_ds.basis, model.reference_ds.basis)
        assert np.array_equal(loaded.reference_ds.spectrum, model.reference_ds.spectrum)
        assert np.array_equal(loaded.training_degrees, model.training_degrees)
        assert loaded.reference_magnitude == model.reference_magnitude
        assert loaded.threshold == model.threshold
        assert np.array_equal(detect(noise_series, loaded).degrees, detect(noise_series, model).degrees)

    def test_overlap_rate_survives(self, text_file: TextFile, noise_series: TimeSeries) -> None:
        """Test that a configuration given by ov_rate is stored as such."""
        config = DetectorConfig(w=16, M=16, ov_rate=0.5, sig_dims="energy:0.9", nor_dims=6)
        path = text_file("", suffix=".model")

        save_model(train(noise_series, config), path)

        assert load_model(path).config == config

    def test_missing_section_raises(self, text_file: TextFile) -> None:
        """Test that a model file without a threshold is rejected."""
        path = text_file("[config]\nw = 3\nM = 3\ntau = 1\nsig_dims = 1\n[reference_ds]\n3 1\n1\n0\n0\n")

        with pytest.raises(ParseError) as exc_info:
            load_model(path)

        assert "reference_spectrum" in str(exc_info.value)

    def test_bad_row_names_the_line(self, text_file: TextFile) -> None:
        """Test that a malformed basis row is reported with its line."""
        path = text_file("[config]\nw = 2\nM = 2\ntau = 1\nsig_dims = 1\n[reference_ds]\n2 1\n1\nx\n")

        with pytest.raises(ParseError) as exc_info:
            load_model(path)

        assert exc_info.value.line == 9


class TestWriters:
    """Tests for the score, report and embedding writers."""

    def test_write_scores(self, text_file: TextFile, noise_series: TimeSeries, small_config: DetectorConfig) -> None:
        """Test the header, the exact degrees and 0/1 flags."""
        scores = detect(noise_series, train(noise_series, small_config))
        path = text_file("", suffix=".csv")

        write_scores(scores, path)
        frame = pd.read_csv(path, float_precision="round_trip")

        assert list(frame.columns) == ["time_index", "degree", "flag"]
        assert frame["time_index"].tolist() == scores.time_indices.tolist()
        assert np.array_equal(frame["degree"].to_numpy(), scores.degrees)
        assert set(frame["flag"]) <= {0, 1}

    def test_write_report(self, text_file: TextFile) -> None:
        """Test one row per cell with the parameter columns first."""
        report = SweepReport(
            rows=[
                SweepRow(method=Method.SSA1, params={"w": 8, "M": 8, "tau": 4}, auc=0.75, seconds=0.1),
                SweepRow(method=Method.AR, params={"max_order": 5}, seconds=0.2, error="ConditioningError: x"),
            ]
        )
        path = text_file("", suffix=".csv")

        write_report(report, path)
        frame = pd.read_csv(path, keep_default_na=False)

        assert list(frame.columns) == REPORT_COLUMNS
        assert list(frame.columns)[:12] == [
            "method", "w", "M", "tau", "ov_rate", "r", "nor_dims", "c", "delta_floor", "auc", "seconds", "max_order"
        ]
        assert frame.columns[-1] == "error"
        assert frame["method"].tolist() == ["ssa1", "ar"]
        assert float(frame.loc[1, "max_order"]) == 5.0
        assert frame.loc[0, "max_order"] == ""
        assert float(frame.loc[0, "auc"]) == 0.75
        assert frame.loc[1, "error"] == "ConditioningError: x"

    def test_write_embedding_pads_missing_axes(self, text_file: TextFile) -> None:
        """Test that a two-axis embedding is written with z = 0."""
        r = np.sqrt(2.0)
        D = np.array([[0, 1, r, 1], [1, 0, 1, r], [r, 1, 0, 1], [1, r, 1, 0]], dtype=float)
        path = text_file("", suffix=".csv")

        write_embedding(mds_embed(D, dim=3, labels=[0, 0, 1, 1]), path)
        frame = pd.read_csv(path)

        assert list(frame.columns) == ["x", "y", "z", "label", "time_index"]
        assert np.all(frame["z"] == 0.0)
        assert frame["label"].tolist() == [0, 0, 1, 1]
