"""Pytest configuration and fixtures for testing ssa_diffspace."""

import sys
import tempfile
from pathlib import Path
from typing import (
    Callable,
    Generator,
    Tuple,
)

import numpy as np
import pytest


THIS_DIR = Path(__file__).parent
TESTS_DIR_PARENT = (THIS_DIR / "..").resolve()

# Ensure that `from tests ...` import statements work within the tests/ dir
sys.path.insert(0, str(TESTS_DIR_PARENT))

# Add src directory to path to ensure package can be imported
src_dir = TESTS_DIR_PARENT / "src"
if src_dir.exists():
    sys.path.insert(0, str(src_dir))

from ssa_diffspace.config import (  # noqa: E402
    DetectorConfig,
    SyntheticSpec,
)
from ssa_diffspace.io import generate_synthetic  # noqa: E402
from ssa_diffspace.types import (  # noqa: E402
    Dataset,
    Subspace,
    TimeSeries,
)


# ============================================================================
# Random Subspaces
# ============================================================================


def random_subspace(rng: np.random.Generator, ambient: int, dim: int) -> Subspace:
    """Uniformly random ``dim``-dimensional subspace of R^ambient."""
    return Subspace.from_basis(rng.standard_normal((ambient, dim)))


def subspace_pair_with_overlap(
    rng: np.random.Generator, ambient: int, dim_p: int, dim_q: int, shared: int
) -> Tuple[Subspace, Subspace]:
    """Two random subspaces that share exactly ``shared`` directions (generically)."""
    frame = np.linalg.qr(rng.standard_normal((ambient, ambient)))[0]
    common = frame[:, :shared]
    p_rest = rng.standard_normal((ambient, dim_p - shared))
    q_rest = rng.standard_normal((ambient, dim_q - shared))
    return (
        Subspace.from_basis(np.hstack([common, p_rest])),
        Subspace.from_basis(np.hstack([common, q_rest])),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded random generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def make_subspace(rng: np.random.Generator) -> Callable[[int, int], Subspace]:
    """Factory of random subspaces drawn from the shared seeded generator."""

    def factory(ambient: int, dim: int) -> Subspace:
        return random_subspace(rng, ambient, dim)

    return factory


# ============================================================================
# Configurations
# ============================================================================


@pytest.fixture
def small_config() -> DetectorConfig:
    """Small detector configuration that keeps every test fast."""
    return DetectorConfig(w=16, M=16, tau=8, sig_dims=3, nor_dims=6, c=3)


@pytest.fixture
def burst_config() -> DetectorConfig:
    """Configuration used on the burst series; the rank matches the two-dimensional sine background."""
    return DetectorConfig(w=32, M=32, tau=16, sig_dims=2, nor_dims=4, c=2)


# ============================================================================
# Series
# ============================================================================


@pytest.fixture
def noise_series(rng: np.random.Generator) -> TimeSeries:
    """Unlabelled white noise."""
    return TimeSeries(samples=rng.standard_normal(400), name="noise")


@pytest.fixture
def burst_series() -> TimeSeries:
    """A lightly noisy sine interrupted by a strong noise burst; samples around the burst are labelled 1.

    The burst occupies 0-based samples 1000..1063 and the labels cover 960..1104. The sine runs
    on the global sample index, so it resumes in phase after the burst.
    """
    background = {"kind": "sine", "freq": 0.05, "amp": 1.0, "sigma": 0.1}
    spec = SyntheticSpec.model_validate(
        {
            "name": "burst",
            "seed": 3,
            "label_half_width": 40,
            "segments": [
                {**background, "length": 1000},
                {"kind": "noise", "length": 64, "sigma": 2.0},
                {**background, "length": 436},
            ],
        }
    )
    return generate_synthetic(spec)


@pytest.fixture
def burst_dataset(burst_series: TimeSeries) -> Dataset:
    """The burst series with a 600-sample normal training prefix."""
    return Dataset(series=burst_series, split=(600, 900))


# ============================================================================
# Files
# ============================================================================


@pytest.fixture
def text_file() -> Generator[Callable[[str, str], Path], None, None]:
    """Factory that writes temporary text files and removes them afterwards."""
    paths = []

    def factory(content: str, suffix: str = ".txt") -> Path:
        with tempfile.NamedTemporaryFile(mode="w", suffix=suffix, delete=False) as f:
            f.write(content)
            paths.append(Path(f.name))
        return paths[-1]

    yield factory

    # Cleanup
    for path in paths:
        if path.exists():
            path.unlink()
