"""Utility functions shared across ssa_diffspace modules."""

import logging
import math
from pathlib import Path
from typing import Optional

import numpy as np
import numpy.typing as npt

from .errors import ParseError


FLOAT_FORMAT = "%.17g"
"""printf-style format that round-trips every float64 exactly."""


def configure_logging(
    name: str = "ssa_diffspace",
    level: str = "INFO",
    format: Optional[str] = None,
    datefmt: Optional[str] = None,
) -> None:
    """Configure logging for the ssa_diffspace library.

    Ensures the root logger has a handler and sets the level of the library logger.
    The library itself never installs handlers on import.

    Note:
        For more control, configure logging directly with Python's logging module
        in the application code.

    Args:
        name: Logger name to configure. Defaults to the package logger.
        level: Log level as a string (DEBUG, INFO, WARNING, ERROR, CRITICAL).
               Defaults to "INFO".
        format: Optional custom format string for log messages.
                If not provided, uses a default format with timestamp and level.
        datefmt: Optional custom date format string.

    Examples:
    ::

        >>> from ssa_diffspace import configure_logging
        >>> configure_logging(level="DEBUG")

        >>> import logging
        >>> logging.getLogger("ssa_diffspace.detector").setLevel(logging.DEBUG)
    """
    log_level = getattr(logging, level.upper(), logging.INFO)

    root_logger = logging.getLogger()
    if not root_logger.handlers:
        logging.basicConfig(
            level=log_level,
            format=format or "%(asctime)s %(levelname)-8s %(name)s - %(message)s",
            datefmt=datefmt or "%Y-%m-%d %H:%M:%S",
        )

    library_logger = logging.getLogger(name)
    library_logger.setLevel(log_level)


def round_half_up(value: float) -> int:
    """Round to the nearest integer with halves going up (``round`` in Python rounds halves to even).

    Examples:
        >>> round_half_up(76.5)
        77
        >>> round_half_up(2.5)
        3
    """
    return int(math.floor(value + 0.5))


def fix_signs(basis: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Flip columns so that each column's entry of largest magnitude is nonnegative.

    Ties on the magnitude resolve to the earliest row. Returns a new array.
    """
    fixed = np.array(basis, dtype=np.float64, copy=True)
    if fixed.size == 0:
        return fixed
    pivots = np.argmax(np.abs(fixed), axis=0)
    signs = np.where(fixed[pivots, np.arange(fixed.shape[1])] < 0.0, -1.0, 1.0)
    return fixed * signs


def readonly(array: npt.ArrayLike, dtype: type = np.float64) -> npt.NDArray:
    """Return a read-only copy of ``array`` with the given dtype."""
    frozen = np.array(array, dtype=dtype, copy=True)
    frozen.flags.writeable = False
    return frozen


def format_float(value: float) -> str:
    """Format a float with 17 significant digits (lossless for float64)."""
    return FLOAT_FORMAT % value


def read_text(path: Path) -> str:
    """Read a UTF-8 text file.

    Raises:
        ParseError: If the bytes are not valid UTF-8; the message names the offending line.
    """
    data = path.read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(
            f"{path} is not valid UTF-8 (byte 0x{data[e.start]:02x} at offset {e.start})",
            line=data.count(b"\n", 0, e.start) + 1,
        )
