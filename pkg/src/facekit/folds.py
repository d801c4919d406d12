"""Stratified fold assignment shared by dataset splitting and cross-validation."""

from __future__ import annotations

import numpy as np

from facekit.errors import TooFewFaces


def stratified_fold_indices(labels, k: int, seed) -> np.ndarray:
    """Assign each row a fold in [0, k), stratified by label.

    Per class, shuffled indices are dealt round-robin from a random starting
    fold, so each fold receives floor(n_c/k) or ceil(n_c/k) members of class c
    and overall fold sizes stay within one face of proportional allocation.
    Deterministic given ``seed`` (any value accepted by default_rng).
    """
    labels = np.asarray(labels)
    n = labels.shape[0]
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    rng = np.random.default_rng(seed)
    out = np.empty(n, dtype=np.int64)
    for cls in sorted(np.unique(labels).tolist()):
        idx = np.flatnonzero(labels == cls)
        if idx.size < k:
            raise TooFewFaces(f"class {cls!r} has {idx.size} faces, need at least {k}")
        perm = rng.permutation(idx)
        start = int(rng.integers(k))
        out[perm] = (np.arange(perm.size) + start) % k
    return out
