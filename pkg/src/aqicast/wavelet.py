"""Multi-level orthonormal wavelet decomposition, thresholding, reconstruction.

The transform is the classic recursive pyramid: each level splits the current
approximation into a low-pass approximation and a high-pass detail sequence,
both downsampled by two. Filters are orthonormal and applied periodically
(circular convolution), so the per-level map is an orthogonal transform:
reconstruction is exact and coefficient energy equals signal energy.

Odd-length sequences are zero-padded by one sample before a level is computed
and the pad is cut away again on reconstruction; unlike edge-replication this
keeps the transform energy-exact for every input length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    LevelDepthError,
    NumericInputError,
    PyramidShapeError,
    SigmaEstimationError,
)

_SQRT2 = math.sqrt(2.0)

# Orthonormal low-pass filters; the matching high-pass is derived in _highpass.
FILTERS: dict[str, np.ndarray] = {
    "haar": np.array([1.0, 1.0]) / _SQRT2,
    "db2": np.array([
        1.0 + math.sqrt(3.0),
        3.0 + math.sqrt(3.0),
        3.0 - math.sqrt(3.0),
        1.0 - math.sqrt(3.0),
    ]) / (4.0 * _SQRT2),
}

THRESHOLD_RULES = ("none", "universal_soft", "universal_hard")

# Median of |N(0,1)|: scales a detail-coefficient median into a sigma estimate.
_MAD_SCALE = 0.6745


def _highpass(lowpass: np.ndarray) -> np.ndarray:
    taps = len(lowpass)
    return np.array([(-1.0) ** j * lowpass[taps - 1 - j] for j in range(taps)])


@dataclass(frozen=True)
class DenoiseConfig:
    """Filter choice, decomposition depth and coefficient shrinkage rule."""

    filter: str = "haar"
    levels: int = 1
    threshold_rule: str = "universal_soft"

    def __post_init__(self):
        if self.filter not in FILTERS:
            raise ValueError(f"filter must be one of {sorted(FILTERS)}, got {self.filter!r}")
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")
        if self.threshold_rule not in THRESHOLD_RULES:
            raise ValueError(
                f"threshold_rule must be one of {THRESHOLD_RULES}, got {self.threshold_rule!r}")


@dataclass(frozen=True, eq=False)
class CoeffPyramid:
    """Coefficients of a multi-level decomposition.

    ``details[k]`` holds the level k+1 detail sequence (finest first) and
    ``approx`` the final approximation. Level k sequences have length
    ceil(original_length / 2**k).
    """

    levels: int
    approx: np.ndarray
    details: tuple[np.ndarray, ...]
    original_length: int
    filter: str

    def level_lengths(self) -> list[int]:
        lengths = [self.original_length]
        for _ in range(self.levels):
            lengths.append(-(-lengths[-1] // 2))
        return lengths

    def validate(self) -> None:
        if self.filter not in FILTERS:
            raise PyramidShapeError(f"unknown filter {self.filter!r}")
        if self.levels != len(self.details):
            raise PyramidShapeError(
                f"levels={self.levels} but {len(self.details)} detail sequences")
        lengths = self.level_lengths()
        for k, det in enumerate(self.details, start=1):
            if len(det) != lengths[k]:
                raise PyramidShapeError(
                    f"level {k} detail has length {len(det)}, expected {lengths[k]}")
        if len(self.approx) != lengths[self.levels]:
            raise PyramidShapeError(
                f"approximation has length {len(self.approx)}, expected {lengths[self.levels]}")


def max_decomposition_levels(length: int) -> int:
    """Deepest legal decomposition: halve (with padding) while >= 2 samples."""
    levels = 0
    while length >= 2:
        length = -(-length // 2)
        levels += 1
    return levels


def _analysis_step(x: np.ndarray, low: np.ndarray, high: np.ndarray):
    n = len(x)
    if n % 2:
        x = np.concatenate([x, [0.0]])
        n += 1
    # tap-ordered accumulation (no FMA), so e.g. a constant signal under the
    # two-tap filter cancels to detail coefficients of exactly zero
    starts = np.arange(0, n, 2)
    approx = np.zeros(n // 2)
    detail = np.zeros(n // 2)
    for j in range(len(low)):
        segment = x[(starts + j) % n]
        approx += low[j] * segment
        detail += high[j] * segment
    return approx, detail


def _synthesis_step(approx: np.ndarray, detail: np.ndarray,
                    low: np.ndarray, high: np.ndarray, out_len: int) -> np.ndarray:
    n = 2 * len(approx)
    up_a = np.zeros(n)
    up_a[::2] = approx
    up_d = np.zeros(n)
    up_d[::2] = detail
    x = np.zeros(n)
    for j in range(len(low)):
        x += low[j] * np.roll(up_a, j) + high[j] * np.roll(up_d, j)
    return x[:out_len]


def dwt_decompose(signal, config: DenoiseConfig) -> CoeffPyramid:
    """Decompose a finite 1-D signal into a coefficient pyramid."""
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise NumericInputError(f"signal must be 1-D, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise NumericInputError("signal contains NaN or infinite values")
    allowed = max_decomposition_levels(len(x))
    if config.levels > allowed:
        raise LevelDepthError(
            f"{config.levels} levels requested but length {len(x)} allows {allowed}")
    low = FILTERS[config.filter]
    high = _highpass(low)
    approx = x
    details = []
    for _ in range(config.levels):
        approx, detail = _analysis_step(approx, low, high)
        details.append(detail)
    return CoeffPyramid(config.levels, approx, tuple(details), len(x), config.filter)


def universal_threshold(pyramid: CoeffPyramid, sigma_estimate: float | None = None) -> float:
    """sigma * sqrt(2 ln N) with sigma taken from the finest detail level."""
    if sigma_estimate is None:
        if pyramid.levels < 1 or len(pyramid.details[0]) == 0:
            raise SigmaEstimationError(
                "cannot estimate noise scale: level-1 detail is empty and no sigma given")
        sigma_estimate = float(np.median(np.abs(pyramid.details[0]))) / _MAD_SCALE
    return sigma_estimate * math.sqrt(2.0 * math.log(pyramid.original_length))


def threshold_coeffs(pyramid: CoeffPyramid, rule: str,
                     sigma_estimate: float | None = None) -> CoeffPyramid:
    """Shrink detail coefficients; the approximation is never touched."""
    if rule not in THRESHOLD_RULES:
        raise ValueError(f"rule must be one of {THRESHOLD_RULES}, got {rule!r}")
    if rule == "none":
        return pyramid
    lam = universal_threshold(pyramid, sigma_estimate)
    if rule == "universal_soft":
        details = tuple(np.sign(d) * np.maximum(np.abs(d) - lam, 0.0)
                        for d in pyramid.details)
    else:
        details = tuple(np.where(np.abs(d) > lam, d, 0.0) for d in pyramid.details)
    return replace(pyramid, details=details)


def dwt_reconstruct(pyramid: CoeffPyramid) -> np.ndarray:
    """Invert the pyramid with the transposed (upsample-then-filter) operators."""
    pyramid.validate()
    low = FILTERS[pyramid.filter]
    high = _highpass(low)
    lengths = pyramid.level_lengths()
    current = np.asarray(pyramid.approx, dtype=float)
    for k in range(pyramid.levels, 0, -1):
        current = _synthesis_step(current, pyramid.details[k - 1], low, high, lengths[k - 1])
    return current


def denoise_series(signal, config: DenoiseConfig,
                   sigma_estimate: float | None = None) -> np.ndarray:
    """Decompose, shrink detail coefficients, reconstruct."""
    pyramid = dwt_decompose(signal, config)
    pyramid = threshold_coeffs(pyramid, config.threshold_rule, sigma_estimate)
    return dwt_reconstruct(pyramid)
