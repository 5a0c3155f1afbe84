"""Batch metrics over predicted versus true bucket labels, plus timing."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .aqi import N_BUCKETS, BucketLabel
from .errors import EmptyInputError, ShapeMismatchError
from .svm import SvmModel, predict_batch

CSV_COLUMNS = ("n", "accuracy_pct", "error_pct", "forecast_time_ms", "per_sample_ms")


def _check_pair(predicted: Sequence, truth: Sequence) -> tuple[list, list]:
    predicted = list(predicted)
    truth = list(truth)
    if len(predicted) != len(truth):
        raise ShapeMismatchError(
            f"{len(predicted)} predictions for {len(truth)} truths")
    if not predicted:
        raise EmptyInputError("need at least one (predicted, truth) pair")
    return predicted, truth


def accuracy(predicted: Sequence, truth: Sequence) -> float:
    """Percentage of positions where prediction and truth agree."""
    predicted, truth = _check_pair(predicted, truth)
    hits = sum(1 for p, t in zip(predicted, truth) if p == t)
    return 100.0 * hits / len(predicted)


def error_rate(predicted: Sequence, truth: Sequence) -> float:
    """Percentage of positions where prediction and truth disagree."""
    predicted, truth = _check_pair(predicted, truth)
    misses = sum(1 for p, t in zip(predicted, truth) if p != t)
    return 100.0 * misses / len(predicted)


def forecast_time(n_samples: int, per_sample_ms: float) -> float:
    """Total prediction time in ms for a batch at a measured per-sample cost."""
    if n_samples < 0:
        raise ValueError(f"n_samples must be >= 0, got {n_samples}")
    if per_sample_ms < 0:
        raise ValueError(f"per_sample_ms must be >= 0, got {per_sample_ms}")
    return n_samples * per_sample_ms


def confusion_matrix(predicted: Sequence[BucketLabel],
                     truth: Sequence[BucketLabel]) -> np.ndarray:
    """6x6 counts with truth on rows and prediction on columns."""
    predicted, truth = _check_pair(predicted, truth)
    matrix = np.zeros((N_BUCKETS, N_BUCKETS), dtype=int)
    for p, t in zip(predicted, truth):
        matrix[int(t), int(p)] += 1
    return matrix


@dataclass(frozen=True, eq=False)
class EvalReport:
    """All metrics of one prediction run."""

    n_samples: int
    n_correct: int
    n_wrong: int
    accuracy_pct: float
    error_pct: float
    forecast_time_ms: float
    per_sample_ms: float
    confusion: np.ndarray

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "n_correct": self.n_correct,
            "n_wrong": self.n_wrong,
            "accuracy_pct": self.accuracy_pct,
            "error_pct": self.error_pct,
            "forecast_time_ms": self.forecast_time_ms,
            "per_sample_ms": self.per_sample_ms,
            "confusion": [[int(v) for v in row] for row in self.confusion],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, payload: dict) -> "EvalReport":
        return cls(
            n_samples=payload["n_samples"],
            n_correct=payload["n_correct"],
            n_wrong=payload["n_wrong"],
            accuracy_pct=payload["accuracy_pct"],
            error_pct=payload["error_pct"],
            forecast_time_ms=payload["forecast_time_ms"],
            per_sample_ms=payload["per_sample_ms"],
            confusion=np.array(payload["confusion"], dtype=int),
        )

    def csv_row(self) -> str:
        values = (self.n_samples, self.accuracy_pct, self.error_pct,
                  self.forecast_time_ms, self.per_sample_ms)
        return ",".join(repr(v) if isinstance(v, float) else str(v) for v in values)


def build_report(predicted: Sequence[BucketLabel], truth: Sequence[BucketLabel],
                 per_sample_ms: float = 0.0) -> EvalReport:
    """Assemble the full report for one batch of predictions."""
    predicted, truth = _check_pair(predicted, truth)
    n = len(predicted)
    n_correct = sum(1 for p, t in zip(predicted, truth) if p == t)
    return EvalReport(
        n_samples=n,
        n_correct=n_correct,
        n_wrong=n - n_correct,
        accuracy_pct=100.0 * n_correct / n,
        error_pct=100.0 * (n - n_correct) / n,
        forecast_time_ms=forecast_time(n, per_sample_ms),
        per_sample_ms=per_sample_ms,
        confusion=confusion_matrix(predicted, truth),
    )


def measure_per_sample_ms(model: SvmModel, X, warmup: int = 100) -> float:
    """Wall-clock prediction cost per row, single-threaded.

    A warm-up batch of ``warmup`` predictions is run and discarded before
    timing to absorb first-call effects.
    """
    X = np.asarray(X, dtype=float)
    if len(X) == 0:
        raise EmptyInputError("need at least one row to time")
    if warmup > 0:
        reps = int(np.ceil(warmup / len(X)))
        batch = np.vstack([X] * reps)[:warmup]
        predict_batch(model, batch)
    start = time.perf_counter()
    predict_batch(model, X)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return elapsed_ms / len(X)
