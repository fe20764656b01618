"""Polynomial detrending of observed series."""

from __future__ import annotations

import numpy as np

from ..model import SeriesData


def detrend(data: SeriesData, degree: int = 3) -> tuple[SeriesData, np.ndarray]:
    """Remove a per-series polynomial trend by least squares.

    The time index is mapped to [0, 1] before building the design matrix,
    purely for conditioning; the residuals are identical to a raw-time fit.
    Returns the residual series and an n x (degree + 1) coefficient table
    (constant term first).
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if data.T <= degree + 1:
        raise ValueError(
            f"need more than degree + 1 = {degree + 1} observations, got {data.T}"
        )
    t = np.linspace(0.0, 1.0, data.T)
    design = np.vander(t, degree + 1, increasing=True)
    coeffs, *_ = np.linalg.lstsq(design, data.values, rcond=None)
    residual = data.values - design @ coeffs
    out = SeriesData(values=residual, columns=data.columns, dates=data.dates)
    return out, coeffs.T
