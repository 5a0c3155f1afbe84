"""Sliding-window sample construction and per-column wavelet denoising."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import ColumnTooShortError, NumericInputError, ShapeMismatchError
from .ingest import SeriesFrame
from .wavelet import DenoiseConfig, denoise_series


@dataclass(frozen=True, eq=False)
class WindowSet:
    """Chronological forecasting samples cut from a series.

    Row i of ``samples`` is the flattened slice covering times
    [i, i + window_size); ``targets[i]`` is the target value ``horizon`` steps
    after that window ends.
    """

    window_size: int
    horizon: int
    samples: np.ndarray
    targets: np.ndarray

    def __len__(self) -> int:
        return len(self.targets)


def make_windows(series, target, window_size: int = 24, horizon: int = 1) -> WindowSet:
    """Slice ``series`` into overlapping windows aligned with future targets.

    ``series`` may be 1-D (one feature) or 2-D with one column per feature;
    each window is flattened time-major to window_size * n_features values.
    Yields max(0, len(series) - window_size - horizon + 1) samples.
    """
    if window_size < 1:
        raise ValueError(f"window_size must be >= 1, got {window_size}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    x = np.asarray(series, dtype=float)
    y = np.asarray(target, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or y.ndim != 1:
        raise ShapeMismatchError(
            f"series must be 1-D or 2-D and target 1-D, got {x.shape} and {y.shape}")
    if len(x) != len(y):
        raise ShapeMismatchError(f"series has {len(x)} rows but target has {len(y)}")
    count = len(x) - window_size - horizon + 1
    if count <= 0:
        return WindowSet(window_size, horizon,
                         np.empty((0, window_size * x.shape[1])), np.empty(0))
    samples = np.stack([x[i:i + window_size].ravel() for i in range(count)])
    targets = y[window_size + horizon - 1:window_size + horizon - 1 + count].copy()
    return WindowSet(window_size, horizon, samples, targets)


def preprocess_frame(frame: SeriesFrame, config: DenoiseConfig) -> SeriesFrame:
    """Denoise every pollutant column of an imputed frame independently."""
    if frame.has_missing():
        raise NumericInputError(
            f"frame for {frame.city!r} still has missing cells; impute it first")
    if frame.n_rows < 2:
        raise ColumnTooShortError(
            f"frame for {frame.city!r} has {frame.n_rows} row(s); need at least 2")
    denoised = np.column_stack([
        denoise_series(frame.data[:, j], config) for j in range(len(frame.columns))
    ])
    return frame.with_data(denoised)


class WaveletDenoiser(TransformerMixin, BaseEstimator):
    """Stateless transformer applying wavelet shrinkage to each column of X.

    Parameters mirror :class:`DenoiseConfig`; ``sigma`` optionally fixes the
    noise scale instead of estimating it from the finest detail level.
    """

    def __init__(self, filter: str = "haar", levels: int = 1,
                 threshold_rule: str = "universal_soft", sigma: float | None = None):
        self.filter = filter
        self.levels = levels
        self.threshold_rule = threshold_rule
        self.sigma = sigma

    def _config(self) -> DenoiseConfig:
        return DenoiseConfig(self.filter, self.levels, self.threshold_rule)

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ShapeMismatchError(f"X must be 2-D, got shape {X.shape}")
        self._config()  # validate parameters
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ShapeMismatchError(
                f"X must be 2-D with {self.n_features_in_} columns, got shape {X.shape}")
        config = self._config()
        return np.column_stack([
            denoise_series(X[:, j], config, self.sigma) for j in range(X.shape[1])
        ])
