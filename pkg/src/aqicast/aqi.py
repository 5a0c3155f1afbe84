"""AQI scalar computation and the six-bucket severity mapping."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping

from .errors import MissingPollutantError, NumericInputError
from .ingest import Reading
from .schema import AQI_MAX_POLLUTANTS, AQI_MEAN_POLLUTANTS


class BucketLabel(enum.IntEnum):
    """Ordered severity classes; lower ordinal means cleaner air."""

    GOOD = 0
    SATISFACTORY = 1
    MODERATE = 2
    POOR = 3
    VERY_POOR = 4
    SEVERE = 5

    @property
    def display(self) -> str:
        return _DISPLAY[self]

    @classmethod
    def from_display(cls, name: str) -> "BucketLabel":
        try:
            return _FROM_DISPLAY[name]
        except KeyError:
            raise ValueError(f"unknown bucket name {name!r}") from None


_DISPLAY = {
    BucketLabel.GOOD: "Good",
    BucketLabel.SATISFACTORY: "Satisfactory",
    BucketLabel.MODERATE: "Moderate",
    BucketLabel.POOR: "Poor",
    BucketLabel.VERY_POOR: "VeryPoor",
    BucketLabel.SEVERE: "Severe",
}
_FROM_DISPLAY = {v: k for k, v in _DISPLAY.items()}

N_BUCKETS = len(BucketLabel)


@dataclass(frozen=True)
class AqiConfig:
    """Unit bridge from raw AQI to the normalized score plus bucket bounds.

    ``normalizer`` is the AQI value mapping to score 1.0 (default 400, the
    severe threshold of the Indian CPCB scale). ``bounds`` are the five
    ascending upper edges of the first five buckets on the normalized scale.
    """

    normalizer: float = 400.0
    bounds: tuple[float, float, float, float, float] = (0.0, 0.25, 0.5, 0.75, 1.0)

    def __post_init__(self):
        if self.normalizer <= 0:
            raise ValueError(f"normalizer must be > 0, got {self.normalizer}")
        if len(self.bounds) != N_BUCKETS - 1:
            raise ValueError(f"need {N_BUCKETS - 1} bounds, got {len(self.bounds)}")
        for lo, hi in zip(self.bounds, self.bounds[1:]):
            if hi <= lo:
                raise ValueError(f"bounds must be strictly ascending, got {self.bounds}")


DEFAULT_AQI_CONFIG = AqiConfig()


def compute_aqi(reading: Mapping[str, float] | Reading) -> float:
    """Mean of the five averaged pollutants plus the max of CO and O3."""
    values = reading.values if isinstance(reading, Reading) else reading
    picked = {}
    for name in AQI_MEAN_POLLUTANTS + AQI_MAX_POLLUTANTS:
        value = values.get(name)
        if value is None or (isinstance(value, float) and math.isnan(value)):
            raise MissingPollutantError(f"reading is missing pollutant {name!r}")
        value = float(value)
        if not math.isfinite(value) or value < 0:
            raise NumericInputError(
                f"pollutant {name!r} must be finite and >= 0, got {value}")
        picked[name] = value
    mean_part = sum(picked[n] for n in AQI_MEAN_POLLUTANTS) / len(AQI_MEAN_POLLUTANTS)
    max_part = max(picked[n] for n in AQI_MAX_POLLUTANTS)
    return mean_part + max_part


def normalize_aqi(aqi: float, config: AqiConfig = DEFAULT_AQI_CONFIG) -> float:
    """Scale a raw AQI onto the unit bucket scale."""
    if not math.isfinite(aqi) or aqi < 0:
        raise ValueError(f"aqi must be finite and >= 0, got {aqi}")
    return aqi / config.normalizer


def bucket_of_score(score: float, config: AqiConfig = DEFAULT_AQI_CONFIG) -> BucketLabel:
    """Map a normalized score to its bucket.

    Intervals are upper-closed: scores at or below the first bound are Good,
    each following bucket covers (previous bound, bound], and anything above
    the last bound is Severe.
    """
    if not math.isfinite(score) or score < 0:
        raise ValueError(f"score must be finite and >= 0, got {score}")
    for label, bound in zip(BucketLabel, config.bounds):
        if score <= bound:
            return label
    return BucketLabel.SEVERE
