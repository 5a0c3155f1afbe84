"""Multiclass linear max-margin classifier over selected features.

Training minimizes the joint multiclass hinge objective

    lambda * sum_c ||w_c||^2
        + (1/n) * sum_i max(0, 1 + max_{c != y_i} (w_c.x_i + b_c)
                                 - (w_{y_i}.x_i + b_{y_i}))

by per-sample subgradient steps in seed-shuffled epoch order. The step size
decays as learning_rate / sqrt(epoch + 1) and the returned parameters are the
average of the per-epoch iterates over the second half of training, which
removes most of the subgradient jitter. Every class keeps its own weight row
and bias; prediction is the argmax of the per-class affine scores.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .aqi import N_BUCKETS, BucketLabel
from .errors import (
    DegenerateLabelsError,
    InsufficientDataError,
    NumericInputError,
    ShapeMismatchError,
)

MODEL_FORMAT = "aqicast-svm"
MODEL_VERSION = 1


@dataclass(frozen=True)
class SvmHyper:
    """Training hyperparameters; the seed is always explicit."""

    seed: int
    regularization: float = 1e-3
    epochs: int = 200
    learning_rate: float = 0.01

    def __post_init__(self):
        if self.regularization < 0:
            raise ValueError(f"regularization must be >= 0, got {self.regularization}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")


@dataclass(frozen=True, eq=False)
class SvmModel:
    """Per-class weight rows and biases plus everything needed to reuse them."""

    classes: tuple[BucketLabel, ...]
    weights: np.ndarray
    biases: np.ndarray
    feature_names: tuple[str, ...]
    hyper: SvmHyper
    normalizer: float
    missing_classes: tuple[BucketLabel, ...] = ()
    epoch_objectives: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.weights.shape != (len(self.classes), len(self.feature_names)):
            raise ShapeMismatchError(
                f"weights shape {self.weights.shape} != "
                f"({len(self.classes)}, {len(self.feature_names)})")
        if self.biases.shape != (len(self.classes),):
            raise ShapeMismatchError(
                f"biases shape {self.biases.shape} != ({len(self.classes)},)")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.biases).all()):
            raise NumericInputError("model parameters must be finite")

    @property
    def n_features(self) -> int:
        return len(self.feature_names)


def _check_training_input(X, labels) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeMismatchError(f"X must be 2-D, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise NumericInputError("X contains NaN or infinite values")
    y = np.asarray([int(label) for label in labels], dtype=np.intp)
    if len(y) != len(X):
        raise ShapeMismatchError(f"{len(X)} rows but {len(y)} labels")
    if len(X) < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {len(X)}")
    if y.min(initial=0) < 0 or y.max(initial=0) >= N_BUCKETS:
        raise ValueError("labels must be bucket ordinals in [0, 6)")
    if len(np.unique(y)) < 2:
        raise DegenerateLabelsError("training labels contain a single class")
    return X, y


def multiclass_hinge_objective(weights, biases, X, labels,
                               regularization: float) -> float:
    """The trained objective: L2 penalty plus mean maximum-violation hinge."""
    X = np.asarray(X, dtype=float)
    y = np.asarray([int(label) for label in labels], dtype=np.intp)
    scores = X @ weights.T + biases
    own = scores[np.arange(len(y)), y]
    rival = scores.copy()
    rival[np.arange(len(y)), y] = -np.inf
    hinge = np.maximum(0.0, 1.0 + rival.max(axis=1) - own)
    return float(regularization * np.sum(weights * weights) + hinge.mean())


def train_svm(X, labels: Sequence[BucketLabel], hyper: SvmHyper,
              feature_names: Sequence[str] | None = None,
              normalizer: float = 400.0,
              track_objective: bool = False) -> SvmModel:
    """Train the multiclass margin classifier; deterministic given the seed.

    Classes never seen in ``labels`` keep zero weight rows, are listed in
    ``missing_classes`` and are skipped when picking the update rival. With
    ``track_objective`` the objective of the raw iterate is recorded after
    each epoch (the returned parameters are still the tail average).
    """
    X, y = _check_training_input(X, labels)
    n, d = X.shape
    if feature_names is None:
        feature_names = tuple(f"x{j}" for j in range(d))
    else:
        feature_names = tuple(feature_names)
        if len(feature_names) != d:
            raise ShapeMismatchError(
                f"{len(feature_names)} feature names for {d} columns")

    present = np.zeros(N_BUCKETS, dtype=bool)
    present[np.unique(y)] = True
    absent = np.flatnonzero(~present)

    rng = np.random.default_rng(hyper.seed)
    W = np.zeros((N_BUCKETS, d))
    b = np.zeros(N_BUCKETS)
    tail_from = hyper.epochs // 2
    W_sum = np.zeros_like(W)
    b_sum = np.zeros_like(b)
    averaged = 0
    objectives: list[float] = []

    for epoch in range(hyper.epochs):
        step = hyper.learning_rate / np.sqrt(epoch + 1.0)
        shrink = 1.0 - 2.0 * step * hyper.regularization
        for i in rng.permutation(n):
            x = X[i]
            yi = y[i]
            f = W @ x + b
            if len(absent):
                f[absent] = -np.inf
            own = f[yi]
            f[yi] = -np.inf
            rival = int(np.argmax(f))
            W *= shrink
            if 1.0 + f[rival] - own > 0.0:
                W[yi] += step * x
                W[rival] -= step * x
                b[yi] += step
                b[rival] -= step
        if track_objective:
            objectives.append(
                multiclass_hinge_objective(W, b, X, y, hyper.regularization))
        if epoch >= tail_from:
            W_sum += W
            b_sum += b
            averaged += 1

    W_avg = W_sum / averaged
    b_avg = b_sum / averaged
    W_avg[absent] = 0.0
    b_avg[absent] = 0.0
    return SvmModel(
        classes=tuple(BucketLabel),
        weights=W_avg,
        biases=b_avg,
        feature_names=feature_names,
        hyper=hyper,
        normalizer=normalizer,
        missing_classes=tuple(BucketLabel(int(c)) for c in absent),
        epoch_objectives=tuple(objectives) if track_objective else None,
    )


def decision_scores(model: SvmModel, X) -> np.ndarray:
    """Per-class affine scores for a batch of rows."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ShapeMismatchError(
            f"X must be 2-D with {model.n_features} columns, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise NumericInputError("X contains NaN or infinite values")
    return X @ model.weights.T + model.biases


def predict_batch(model: SvmModel, X) -> tuple[list[BucketLabel], np.ndarray]:
    """Predict a batch; untrained classes never win the argmax."""
    scores = decision_scores(model, X)
    candidates = scores
    if model.missing_classes:
        candidates = scores.copy()
        candidates[:, [int(c) for c in model.missing_classes]] = -np.inf
    best = candidates.argmax(axis=1)  # first max wins: lower ordinal on ties
    return [model.classes[i] for i in best], scores


def predict(model: SvmModel, x) -> tuple[BucketLabel, np.ndarray]:
    """Predict one feature vector, returning the label and all class scores."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) != model.n_features:
        raise ShapeMismatchError(
            f"x must be a length-{model.n_features} vector, got shape {x.shape}")
    labels, scores = predict_batch(model, x[None, :])
    return labels[0], scores[0]


def model_to_dict(model: SvmModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "classes": [c.display for c in model.classes],
        "missing_classes": [c.display for c in model.missing_classes],
        "feature_names": list(model.feature_names),
        "weights": [[float(v) for v in row] for row in model.weights],
        "biases": [float(v) for v in model.biases],
        "hyper": {
            "seed": model.hyper.seed,
            "regularization": model.hyper.regularization,
            "epochs": model.hyper.epochs,
            "learning_rate": model.hyper.learning_rate,
        },
        "normalizer": model.normalizer,
    }


def model_from_dict(payload: dict) -> SvmModel:
    if payload.get("format") != MODEL_FORMAT:
        raise ValueError(f"not an {MODEL_FORMAT} document")
    if payload.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {payload.get('version')!r}")
    hyper = SvmHyper(
        seed=payload["hyper"]["seed"],
        regularization=payload["hyper"]["regularization"],
        epochs=payload["hyper"]["epochs"],
        learning_rate=payload["hyper"]["learning_rate"],
    )
    return SvmModel(
        classes=tuple(BucketLabel.from_display(c) for c in payload["classes"]),
        weights=np.array(payload["weights"], dtype=float),
        biases=np.array(payload["biases"], dtype=float),
        feature_names=tuple(payload["feature_names"]),
        hyper=hyper,
        normalizer=payload["normalizer"],
        missing_classes=tuple(BucketLabel.from_display(c)
                              for c in payload["missing_classes"]),
    )


def save_model(model: SvmModel, path) -> None:
    Path(path).write_text(model_to_json(model), encoding="utf-8")


def model_to_json(model: SvmModel) -> str:
    # repr-based float encoding: parses back to the identical double
    return json.dumps(model_to_dict(model), sort_keys=True, indent=2) + "\n"


def load_model(path) -> SvmModel:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


class MulticlassLinearSvm(ClassifierMixin, BaseEstimator):
    """Estimator wrapper around :func:`train_svm` / :func:`predict_batch`."""

    def __init__(self, seed: int = 0, regularization: float = 1e-3,
                 epochs: int = 200, learning_rate: float = 0.01):
        self.seed = seed
        self.regularization = regularization
        self.epochs = epochs
        self.learning_rate = learning_rate

    def fit(self, X, y):
        hyper = SvmHyper(seed=self.seed, regularization=self.regularization,
                         epochs=self.epochs, learning_rate=self.learning_rate)
        self.model_ = train_svm(X, y, hyper)
        self.classes_ = np.array([int(c) for c in self.model_.classes])
        self.n_features_in_ = self.model_.n_features
        return self

    def decision_function(self, X):
        check_is_fitted(self)
        return decision_scores(self.model_, X)

    def predict(self, X):
        check_is_fitted(self)
        labels, _ = predict_batch(self.model_, X)
        return np.array([int(label) for label in labels])
