"""Repeated stratified cross-validation with in-fold dimensionality reduction.

Every split refits PCA on its training rows only, so no statistic of a test
fold ever reaches the model.  Per split, each face is predicted exactly once
by the model trained without its fold; split accuracy is the unweighted mean
of the fold accuracies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from facekit.folds import stratified_fold_indices
from facekit.learn.lasso import lasso_fit
from facekit.learn.lda import lda_fit, lda_predict
from facekit.learn.pca import pca_fit
from facekit.stats.correlation import pearson


@dataclass(frozen=True)
class CvResult:
    task: str  # classify | regress
    per_split_metric: np.ndarray  # accuracy (classify) or Pearson r (regress)
    predictions: np.ndarray  # (repeats, n) out-of-fold predictions
    k: int
    repeats: int
    seed: int

    @property
    def mean(self) -> float:
        return float(self.per_split_metric.mean())

    @property
    def std(self) -> float:
        return float(self.per_split_metric.std(ddof=1)) if self.repeats > 1 else 0.0

    @property
    def mean_prediction(self) -> np.ndarray:
        return self.predictions.mean(axis=0)


def fold_fit(X: np.ndarray, y: np.ndarray, train_mask: np.ndarray, task: str,
             variance_target: float = 0.95, inner_seed=0):
    """Fit one fold's pipeline from training rows alone.

    Returns (pca basis, model).  Nothing outside ``train_mask`` is read, so
    altering test-fold labels cannot change the result; the leakage test
    relies on that being bit-exact.
    """
    basis = pca_fit(X[train_mask], variance_target)
    Ztr = basis.transform(X[train_mask])
    if task == "classify":
        return basis, lda_fit(Ztr, y[train_mask])
    return basis, lasso_fit(Ztr, y[train_mask].astype(float), seed=inner_seed)


def fold_predict(basis, model, X: np.ndarray, test_mask: np.ndarray, task: str) -> np.ndarray:
    Zte = basis.transform(X[test_mask])
    if task == "classify":
        labels, _ = lda_predict(model, Zte)
        return labels
    return model.predict(Zte)


def cross_validate(X: np.ndarray, y: np.ndarray, task: str = "classify",
                   k: int = 10, repeats: int = 100, seed: int = 0,
                   variance_target: float = 0.95) -> CvResult:
    """k-fold cross-validation repeated over fresh stratified splits.

    Classification stratifies folds by label and scores accuracy; regression
    deals folds without stratification and scores the Pearson correlation of
    the concatenated out-of-fold predictions with the observations.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if task not in ("classify", "regress"):
        raise ValueError(f"unknown task {task!r}")
    n = X.shape[0]
    metrics = np.empty(repeats)
    preds = np.empty((repeats, n))
    strat = y if task == "classify" else np.zeros(n, dtype=int)
    for r in range(repeats):
        folds = stratified_fold_indices(strat, k, seed=(seed, r))
        fold_scores = []
        for f in range(k):
            test = folds == f
            basis, model = fold_fit(X, y, ~test, task, variance_target,
                                    inner_seed=(seed, r, f))
            out = fold_predict(basis, model, X, test, task)
            preds[r, test] = out
            if task == "classify":
                fold_scores.append(float(np.mean(out == y[test])))
        if task == "classify":
            metrics[r] = float(np.mean(fold_scores))
        else:
            metrics[r] = pearson(preds[r], y.astype(float))
    return CvResult(
        task=task,
        per_split_metric=metrics,
        predictions=preds,
        k=k,
        repeats=repeats,
        seed=seed,
    )


def compare_models(a: CvResult, b: CvResult, threshold: float = 0.95) -> dict:
    """Is model a reliably worse than model b across matched splits?

    Significant when a scores below b in more than ``threshold`` of the
    splits (the paper's criterion: >95 of 100).
    """
    n = min(len(a.per_split_metric), len(b.per_split_metric))
    wins = int(np.sum(a.per_split_metric[:n] < b.per_split_metric[:n]))
    return {
        "n_splits": n,
        "a_below_b": wins,
        "significant": wins > threshold * n,
    }


def predict_human_accuracy(X: np.ndarray, accuracy: np.ndarray,
                           class_labels: np.ndarray, k: int = 10,
                           seed: int = 0, variance_target: float = 0.95,
                           ) -> tuple[np.ndarray, float]:
    """Out-of-fold regression of per-face accuracy, fit separately per class.

    For each class, features are PCA-reduced and a lasso regression predicts
    that class's accuracies fold by fold; predictions are concatenated back
    into face order and correlated with the observed accuracies.
    """
    X = np.asarray(X, dtype=float)
    acc = np.asarray(accuracy, dtype=float)
    cls = np.asarray(class_labels)
    pred = np.empty_like(acc)
    for ci, c in enumerate(sorted(np.unique(cls).tolist())):
        rows = np.flatnonzero(cls == c)
        folds = stratified_fold_indices(np.zeros(rows.size, dtype=int), k, seed=(seed, ci))
        for f in range(k):
            test = rows[folds == f]
            train = rows[folds != f]
            basis = pca_fit(X[train], variance_target)
            model = lasso_fit(basis.transform(X[train]), acc[train], seed=(seed, ci, f))
            pred[test] = model.predict(basis.transform(X[test]))
    return pred, pearson(pred, acc)
