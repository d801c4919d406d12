"""Two-class linear discriminant analysis with pooled covariance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from facekit.errors import NonFiniteInput, SingleClass, SingularCovariance

_RIDGE_FACTOR = 1e-8


@dataclass(frozen=True)
class LdaModel:
    weights: np.ndarray
    bias: float
    class_priors: np.ndarray  # (2,)
    class_means: np.ndarray  # (2, p)

    def score(self, x: np.ndarray) -> np.ndarray:
        """Signed decision value; positive favors class 1."""
        return np.asarray(x, dtype=float) @ self.weights + self.bias


def lda_fit(X: np.ndarray, labels: np.ndarray, priors=None) -> LdaModel:
    """Fit w proportional to pooled-covariance-inverse times the mean gap.

    Priors default to equal (the tasks here are near-balanced); pass
    empirical or custom priors to move the bias.  A near-singular pooled
    covariance gets a small ridge (1e-8 * trace / p on the diagonal); if the
    solve still fails the covariance is reported singular.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(labels).astype(int).ravel()
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise NonFiniteInput("lda input")
    classes = np.unique(y)
    if classes.size != 2:
        raise SingleClass(f"need exactly 2 classes, got {classes.tolist()}")
    X0, X1 = X[y == classes[0]], X[y == classes[1]]
    n0, n1 = len(X0), len(X1)
    if min(n0, n1) < 2:
        raise SingleClass("each class needs >= 2 rows for a pooled covariance")
    mu0, mu1 = X0.mean(axis=0), X1.mean(axis=0)
    p = X.shape[1]
    pooled = (
        (X0 - mu0).T @ (X0 - mu0) + (X1 - mu1).T @ (X1 - mu1)
    ) / (n0 + n1 - 2)

    if priors is None:
        pri = np.array([0.5, 0.5])
    else:
        pri = np.asarray(priors, dtype=float)
        pri = pri / pri.sum()

    gap = mu1 - mu0
    try:
        w = np.linalg.solve(pooled, gap)
        if not np.all(np.isfinite(w)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        ridge = _RIDGE_FACTOR * np.trace(pooled) / p
        try:
            w = np.linalg.solve(pooled + ridge * np.eye(p), gap)
        except np.linalg.LinAlgError:
            raise SingularCovariance("pooled covariance singular even after ridge")
        if not np.all(np.isfinite(w)):
            raise SingularCovariance("pooled covariance singular even after ridge")
    bias = float(-w @ (mu0 + mu1) / 2.0 + math.log(pri[1] / pri[0]))
    return LdaModel(
        weights=w,
        bias=bias,
        class_priors=pri,
        class_means=np.vstack([mu0, mu1]),
    )


def lda_predict(model: LdaModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(class labels in {0, 1}, scores).

    A score of exactly zero goes to the class with the larger prior; equal
    priors fall back to class 0.
    """
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    scores = model.score(X.reshape(1, -1) if single else X)
    tie_class = int(model.class_priors[1] > model.class_priors[0])
    labels = np.where(scores > 0, 1, np.where(scores < 0, 0, tie_class))
    if single:
        return labels[0], scores[0]
    return labels, scores
