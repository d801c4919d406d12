"""Split-half reliability and bootstrap correlation uncertainty."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from facekit.records import ResponseRecord
from facekit.stats.accuracy import per_face_accuracy
from facekit.stats.correlation import pearson


def spearman_brown(r: float) -> float:
    """Full-length reliability implied by a half-sample correlation."""
    return 2.0 * r / (1.0 + r)


@dataclass(frozen=True)
class ReliabilityResult:
    r: float
    rc: float
    n_faces: int
    scheme: str
    n_draws: int


def _half_accuracies(responses: list[ResponseRecord], subjects_a: set[str],
                     subjects_b: set[str]) -> tuple[np.ndarray, np.ndarray, int]:
    in_a = [r for r in responses if r.session_id in subjects_a]
    in_b = [r for r in responses if r.session_id in subjects_b]
    acc_a, _ = per_face_accuracy(in_a)
    acc_b, _ = per_face_accuracy(in_b)
    common = sorted(set(acc_a) & set(acc_b))
    a = np.array([acc_a[f].accuracy for f in common])
    b = np.array([acc_b[f].accuracy for f in common])
    return a, b, len(common)


def split_half_reliability(responses: list[ResponseRecord],
                           scheme: str = "even_odd", n_draws: int = 1000,
                           seed: int = 0) -> ReliabilityResult:
    """Correlation between two half-populations' per-face accuracies.

    even_odd splits subjects by their rank in sorted id order; random
    averages the correlation over ``n_draws`` random half-splits.  The
    Spearman-Brown correction is applied to the (averaged) r.  Only faces
    answered in both halves enter the correlation.
    """
    subjects = sorted({r.session_id for r in responses})
    if len(subjects) < 2:
        raise ValueError("need at least 2 subjects for a split-half estimate")
    if scheme == "even_odd":
        a, b, n = _half_accuracies(responses, set(subjects[0::2]), set(subjects[1::2]))
        r = pearson(a, b)
        return ReliabilityResult(r=r, rc=spearman_brown(r), n_faces=n,
                                 scheme=scheme, n_draws=1)
    if scheme != "random":
        raise ValueError(f"unknown scheme {scheme!r}")
    rng = np.random.default_rng(seed)
    rs = []
    n_min = None
    half = len(subjects) // 2
    for _ in range(n_draws):
        perm = rng.permutation(len(subjects))
        sa = {subjects[i] for i in perm[:half]}
        sb = {subjects[i] for i in perm[half:]}
        a, b, n = _half_accuracies(responses, sa, sb)
        n_min = n if n_min is None else min(n_min, n)
        rs.append(pearson(a, b))
    r = float(np.mean(rs))
    return ReliabilityResult(r=r, rc=spearman_brown(r), n_faces=n_min or 0,
                             scheme=scheme, n_draws=n_draws)


def model_human_correlation(predictions, human_accuracy, n_boot: int = 1000,
                            seed: int = 0) -> tuple[float, float]:
    """Pearson r over faces plus its bootstrap standard error.

    The s.e.m. is the standard deviation of r over ``n_boot`` resamples of
    faces with replacement; degenerate resamples (either side constant) are
    skipped.
    """
    pred = np.asarray(predictions, dtype=float)
    obs = np.asarray(human_accuracy, dtype=float)
    if pred.size != obs.size:
        raise ValueError(f"length mismatch: {pred.size} vs {obs.size}")
    r = pearson(pred, obs)
    rng = np.random.default_rng(seed)
    n = pred.size
    draws = []
    for _ in range(n_boot):
        idx = rng.integers(0, n, size=n)
        p, o = pred[idx], obs[idx]
        if p.std() == 0.0 or o.std() == 0.0:
            continue
        draws.append(pearson(p, o))
    sem = float(np.std(draws, ddof=1)) if len(draws) > 1 else 0.0
    return r, sem
