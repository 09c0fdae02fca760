"""Autoregressive prediction baseline: Yule-Walker fits, AIC order selection, residual scores."""

import logging
from typing import Optional

import numpy as np
import numpy.typing as npt
from scipy import linalg

from .errors import (
    BoundsError,
    ConditioningError,
)
from .types import (
    ARModel,
    FloatArray,
    ScorePoint,
    ScoreSeries,
    TimeSeries,
)


logger = logging.getLogger(__name__)

DEFAULT_MAX_ORDER = 30
CONDITION_LIMIT = 1e12


def autocovariance(samples: npt.ArrayLike, max_lag: int) -> FloatArray:
    """Biased (``1/n``) sample autocovariances of the mean-centred samples at lags ``0 .. max_lag``.

    The biased estimator keeps the Toeplitz system positive semidefinite.
    """
    x = np.asarray(samples, dtype=np.float64)
    x = x - x.mean()
    n = x.size
    return np.array([x[: n - lag] @ x[lag:] for lag in range(max_lag + 1)]) / n


def _solve_yule_walker(acov: FloatArray, order: int) -> FloatArray:
    if order == 0:
        return np.zeros(0)
    R = linalg.toeplitz(acov[:order])
    condition = np.linalg.cond(R)
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise ConditioningError(
            f"autocovariance system of order p={order} is ill-conditioned (cond={condition:.3g})", order
        )
    return linalg.solve_toeplitz(acov[:order], acov[1 : order + 1])


def fit_ar(series: TimeSeries, max_order: int = DEFAULT_MAX_ORDER) -> ARModel:
    """Fit AR models of orders ``0 .. max_order`` with Yule-Walker and keep the AIC minimiser.

    ``AIC(p) = n * ln(sigma_p^2) + 2p`` over the ``n`` samples; ties go to the smaller order.

    Raises:
        BoundsError: If ``len(series) <= 2 * max_order`` or ``max_order < 0``.
        ConditioningError: If the autocovariance system of some order is singular or
            ill-conditioned (a constant series fails at order 0).
    """
    n = len(series)
    if max_order < 0:
        raise BoundsError(f"max_order must satisfy max_order >= 0, got {max_order}")
    if n <= 2 * max_order:
        raise BoundsError(f"series length must satisfy n > 2 * max_order = {2 * max_order}, got n={n}")

    acov = autocovariance(series.samples, max_order)
    if acov[0] <= 0.0:
        raise ConditioningError("series has zero variance", 0)

    best: Optional[ARModel] = None
    curve = []
    for order in range(max_order + 1):
        coefficients = _solve_yule_walker(acov, order)
        noise_variance = float(acov[0] - coefficients @ acov[1 : order + 1])
        if noise_variance <= 0.0:
            raise ConditioningError(f"non-positive innovation variance at order p={order}", order)
        aic = n * np.log(noise_variance) + 2 * order
        curve.append(float(aic))
        if best is None or aic < best.aic:
            best = ARModel(
                order=order,
                coefficients=tuple(float(a) for a in coefficients),
                noise_variance=noise_variance,
                aic=float(aic),
                mean=float(series.samples.mean()),
            )

    assert best is not None
    logger.info("AR order %d selected by AIC (max_order=%d, n=%d)", best.order, max_order, n)
    return best.model_copy(update={"aic_curve": tuple(curve)})


def ar_residual_score(model: ARModel, series: TimeSeries) -> ScoreSeries:
    """Squared one-step prediction residuals ``(h(t) - h_hat(t))^2`` for ``t > order`` (1-based).

    Raises:
        BoundsError: If the series is not longer than the model order.
    """
    n = len(series)
    p = model.order
    if n <= p:
        raise BoundsError(f"series length must satisfy n > order = {p}, got n={n}")

    x = series.samples - model.mean
    predicted = np.zeros(n - p)
    for lag, coefficient in enumerate(model.coefficients, start=1):
        predicted += coefficient * x[p - lag : n - lag]
    residuals = (x[p:] - predicted) ** 2

    return ScoreSeries(
        points=[ScorePoint(time_index=t, degree=float(r)) for t, r in zip(range(p + 1, n + 1), residuals)]
    )
