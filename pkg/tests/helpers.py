"""Shared test oracles and fixture builders.

Everything here is deliberately independent of the library's own code paths:
closed-form solvers, finite differences and plain-Python enumeration are used
to produce expected values that the implementations must match.
"""

import numpy as np

from aqicast.aqi import BucketLabel, bucket_of_score, compute_aqi, normalize_aqi
from aqicast.schema import AQI_MEAN_POLLUTANTS


def lstsq_fit(X, y):
    """Normal-equations oracle: intercept and coefficients via lstsq."""
    X = np.asarray(X, dtype=float)
    A = np.column_stack([np.ones(len(X)), X])
    solution, *_ = np.linalg.lstsq(A, np.asarray(y, dtype=float), rcond=None)
    return float(solution[0]), solution[1:]


def mean_squared_loss(X, y, beta0, beta):
    X = np.asarray(X, dtype=float)
    return float(np.mean((beta0 + X @ np.asarray(beta) - np.asarray(y)) ** 2))


def finite_diff_gradient(X, y, beta0, beta, h=1e-6):
    """Central-difference oracle for the mean-squared loss gradient."""
    beta = np.asarray(beta, dtype=float)
    g0 = (mean_squared_loss(X, y, beta0 + h, beta)
          - mean_squared_loss(X, y, beta0 - h, beta)) / (2 * h)
    grad = np.zeros_like(beta)
    for j in range(len(beta)):
        up = beta.copy()
        up[j] += h
        down = beta.copy()
        down[j] -= h
        grad[j] = (mean_squared_loss(X, y, beta0, up)
                   - mean_squared_loss(X, y, beta0, down)) / (2 * h)
    return g0, grad


def balanced_bucket_scores(n, rng, gap=0.02, severe_top=1.75):
    """Normalized AQI scores covering all six buckets equally.

    A hairline ``gap`` is kept clear on the open side of each bucket edge; a
    margin classifier cannot resolve boundaries finer than the spacing of the
    data, so the corpus leaves that spacing explicit.
    """
    edges = (0.0, 0.25, 0.5, 0.75, 1.0)
    per = n // 6
    scores, ordinals = [], []
    for c in range(6):
        if c == 0:
            s = np.zeros(per)
        elif c < 5:
            s = rng.uniform(edges[c - 1] + gap, edges[c], per)
        else:
            s = rng.uniform(1.0 + gap, severe_top, per)
        scores.append(s)
        ordinals.append(np.full(per, c))
    scores = np.concatenate(scores)
    ordinals = np.concatenate(ordinals)
    order = rng.permutation(len(scores))
    return scores[order], ordinals[order]


def oracle_labels_from_scores(scores, normalizer=400.0):
    """Run each score through the full reading -> AQI -> bucket chain."""
    labels = []
    for score in scores:
        reading = {name: score * normalizer for name in AQI_MEAN_POLLUTANTS}
        reading.update({"CO": 0.0, "O3": 0.0})
        labels.append(bucket_of_score(normalize_aqi(compute_aqi(reading))))
    return labels


def separable_clusters(seed=7, spread=0.1):
    """Two tight 1-D clusters labeled with the extreme buckets."""
    rng = np.random.default_rng(seed)
    low = -5.0 + spread * rng.standard_normal(50)
    high = 5.0 + spread * rng.standard_normal(50)
    X = np.concatenate([low, high])[:, None]
    y = [BucketLabel.GOOD] * 50 + [BucketLabel.SEVERE] * 50
    return X, y
