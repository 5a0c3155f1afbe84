"""Regression- and correlation-guided feature ranking.

A linear model is fitted to the target by full-batch gradient descent on the
mean-squared loss; the magnitudes of its standardized coefficients are blended
with absolute Pearson correlations into one relevance score per feature, and a
greedy pass drops candidates that are nearly collinear with features already
chosen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import InsufficientDataError, NumericInputError, ShapeMismatchError
from .ingest import SeriesFrame


@dataclass(frozen=True)
class SelectConfig:
    """Selection size, descent hyperparameters and score blending weights."""

    k: int = 7
    learning_rate: float = 0.01
    max_iters: int = 10000
    tol: float = 1e-8
    redundancy_cutoff: float = 0.95
    weight_regression: float = 0.5

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.tol <= 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if not 0.0 < self.redundancy_cutoff <= 1.0:
            raise ValueError(
                f"redundancy_cutoff must be in (0, 1], got {self.redundancy_cutoff}")
        if not 0.0 <= self.weight_regression <= 1.0:
            raise ValueError(
                f"weight_regression must be in [0, 1], got {self.weight_regression}")


@dataclass(frozen=True, eq=False)
class RegressionFit:
    """Result of a gradient-descent linear fit, reported on the input scale.

    ``standardized_coefficients`` are the coefficients in zero-mean unit-
    variance feature space; they are what the relevance ranking compares.
    """

    intercept: float
    coefficients: np.ndarray
    final_loss: float
    iterations: int
    converged: bool
    standardized_coefficients: np.ndarray


@dataclass(frozen=True)
class FeatureRanking:
    """Features ordered by non-increasing relevance plus the selected subset."""

    ranked: tuple[tuple[str, float], ...]
    selected: tuple[str, ...]


def _check_matrix(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1:
        raise ShapeMismatchError(f"need 2-D X and 1-D y, got {X.shape} and {y.shape}")
    if X.shape[0] != y.shape[0]:
        raise ShapeMismatchError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise NumericInputError("X and y must be finite")
    return X, y


def regression_gradient(X, y, beta0: float, beta) -> tuple[float, np.ndarray]:
    """Gradient of the mean-squared loss at (beta0, beta).

    For predictions yhat = beta0 + X @ beta the partials are
    (2/n) * sum(yhat - y) for the intercept and (2/n) * X.T @ (yhat - y)
    for the coefficients.
    """
    X, y = _check_matrix(X, y)
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (X.shape[1],):
        raise ShapeMismatchError(
            f"beta has shape {beta.shape}, expected ({X.shape[1]},)")
    n = len(y)
    residual = beta0 + X @ beta - y
    return float(2.0 * residual.mean()), (2.0 / n) * (X.T @ residual)


def fit_linear_regression(X, y, config: SelectConfig = SelectConfig()) -> RegressionFit:
    """Fit y ~ X by deterministic gradient descent on mean-squared loss.

    Columns are standardized internally (constant columns get coefficient 0)
    and the fit starts at zero, so identical inputs give identical results.
    Descent stops when the sup-norm of the gradient drops below ``config.tol``
    or after ``config.max_iters`` steps; reported coefficients are mapped back
    to the input scale.
    """
    X, y = _check_matrix(X, y)
    n, m = X.shape
    if n < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {n}")

    mean = X.mean(axis=0)
    std = X.std(axis=0)
    constant = std == 0.0
    safe_std = np.where(constant, 1.0, std)
    Z = (X - mean) / safe_std
    Z[:, constant] = 0.0

    beta0 = 0.0
    beta = np.zeros(m)
    iterations = 0
    converged = False
    for _ in range(config.max_iters):
        residual = beta0 + Z @ beta - y
        grad0 = 2.0 * residual.mean()
        grad = (2.0 / n) * (Z.T @ residual)
        grad[constant] = 0.0
        if max(abs(grad0), float(np.max(np.abs(grad), initial=0.0))) < config.tol:
            converged = True
            break
        beta0 -= config.learning_rate * grad0
        beta -= config.learning_rate * grad
        iterations += 1
    else:
        residual = beta0 + Z @ beta - y
        grad0 = 2.0 * residual.mean()
        grad = (2.0 / n) * (Z.T @ residual)
        grad[constant] = 0.0
        converged = max(abs(grad0), float(np.max(np.abs(grad), initial=0.0))) < config.tol

    coefficients = np.where(constant, 0.0, beta / safe_std)
    intercept = beta0 - float(np.sum(np.where(constant, 0.0, beta * mean / safe_std)))
    final_loss = float(np.mean((intercept + X @ coefficients - y) ** 2))
    return RegressionFit(intercept, coefficients, final_loss, iterations,
                         converged, beta.copy())


def correlation_scores(X, y) -> tuple[np.ndarray, np.ndarray]:
    """Absolute Pearson correlation of each column with y, plus the m x m
    inter-feature correlation matrix (unit diagonal; constant columns score 0).
    """
    X, y = _check_matrix(X, y)
    n, m = X.shape
    if n < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {n}")
    Xc = X - X.mean(axis=0)
    yc = y - y.mean()
    x_std = X.std(axis=0)
    y_std = y.std()

    with_y = np.zeros(m)
    if y_std > 0:
        live = x_std > 0
        with_y[live] = np.abs((Xc[:, live] * yc[:, None]).mean(axis=0)
                              / (x_std[live] * y_std))

    matrix = np.eye(m)
    live = np.flatnonzero(x_std > 0)
    if len(live) > 1:
        sub = Xc[:, live] / x_std[live]
        corr = (sub.T @ sub) / n
        matrix[np.ix_(live, live)] = corr
    np.fill_diagonal(matrix, 1.0)
    return with_y, matrix


def rank_features(X, y, names, config: SelectConfig = SelectConfig()) -> FeatureRanking:
    """Score, order and greedily de-duplicate features of a plain matrix."""
    X, y = _check_matrix(X, y)
    names = list(names)
    if len(names) != X.shape[1]:
        raise ShapeMismatchError(
            f"{len(names)} names for {X.shape[1]} columns")

    fit = fit_linear_regression(X, y, config)
    reg = np.abs(fit.standardized_coefficients)
    reg_max = reg.max(initial=0.0)
    reg_scores = reg / reg_max if reg_max > 0 else np.zeros_like(reg)

    corr, matrix = correlation_scores(X, y)
    corr_max = corr.max(initial=0.0)
    corr_scores = corr / corr_max if corr_max > 0 else np.zeros_like(corr)

    scores = (config.weight_regression * reg_scores
              + (1.0 - config.weight_regression) * corr_scores)
    order = np.argsort(-scores, kind="stable")  # ties keep column order

    selected: list[int] = []
    for j in order:
        if len(selected) == config.k:
            break
        if all(abs(matrix[j, s]) <= config.redundancy_cutoff for s in selected):
            selected.append(int(j))

    ranked = tuple((names[j], float(scores[j])) for j in order)
    return FeatureRanking(ranked, tuple(names[j] for j in selected))


def select_features(frame: SeriesFrame, target_column: str,
                    config: SelectConfig = SelectConfig()) -> FeatureRanking:
    """Rank a frame's other columns by how well they explain ``target_column``."""
    if target_column not in frame.columns:
        raise KeyError(f"target column {target_column!r} not in frame")
    if frame.has_missing():
        raise NumericInputError(
            f"frame for {frame.city!r} still has missing cells; impute it first")
    names = [c for c in frame.columns if c != target_column]
    X = np.column_stack([frame.column(c) for c in names])
    y = frame.column(target_column)
    return rank_features(X, y, names, config)


class GradientLinearRegression(RegressorMixin, BaseEstimator):
    """Least-squares linear model trained by full-batch gradient descent."""

    def __init__(self, learning_rate: float = 0.01, max_iters: int = 10000,
                 tol: float = 1e-8):
        self.learning_rate = learning_rate
        self.max_iters = max_iters
        self.tol = tol

    def fit(self, X, y):
        config = SelectConfig(learning_rate=self.learning_rate,
                              max_iters=self.max_iters, tol=self.tol)
        result = fit_linear_regression(X, y, config)
        self.intercept_ = result.intercept
        self.coef_ = result.coefficients
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.fit_result_ = result
        self.n_features_in_ = len(result.coefficients)
        return self

    def predict(self, X):
        check_is_fitted(self)
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ShapeMismatchError(
                f"X must be 2-D with {self.n_features_in_} columns, got shape {X.shape}")
        return self.intercept_ + X @ self.coef_


class CorrelationFeatureSelector(TransformerMixin, BaseEstimator):
    """Transformer keeping the top-k features by the blended relevance score."""

    def __init__(self, k: int = 7, redundancy_cutoff: float = 0.95,
                 weight_regression: float = 0.5, learning_rate: float = 0.01,
                 max_iters: int = 10000, tol: float = 1e-8,
                 feature_names=None):
        self.k = k
        self.redundancy_cutoff = redundancy_cutoff
        self.weight_regression = weight_regression
        self.learning_rate = learning_rate
        self.max_iters = max_iters
        self.tol = tol
        self.feature_names = feature_names

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        config = SelectConfig(k=self.k, learning_rate=self.learning_rate,
                              max_iters=self.max_iters, tol=self.tol,
                              redundancy_cutoff=self.redundancy_cutoff,
                              weight_regression=self.weight_regression)
        names = (list(self.feature_names) if self.feature_names is not None
                 else [f"x{j}" for j in range(X.shape[1])])
        self.ranking_ = rank_features(X, y, names, config)
        selected = set(self.ranking_.selected)
        self.support_ = np.array([name in selected for name in names])
        self.n_features_in_ = X.shape[1]
        return self

    def get_support(self) -> np.ndarray:
        check_is_fitted(self)
        return self.support_.copy()

    def transform(self, X):
        check_is_fitted(self)
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ShapeMismatchError(
                f"X must be 2-D with {self.n_features_in_} columns, got shape {X.shape}")
        return X[:, self.support_]
