"""Pearson correlation, its significance, and pairwise agreement matrices."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.stats import t as t_dist


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ac = a - a.mean()
    bc = b - b.mean()
    denom = np.sqrt((ac @ ac) * (bc @ bc))
    if denom == 0.0:
        return 0.0
    return float(np.clip(ac @ bc / denom, -1.0, 1.0))


def pearson_p(r: float, n: int) -> float:
    """Two-sided p for a correlation of r over n pairs (t distribution)."""
    if n < 3:
        return 1.0
    if abs(r) >= 1.0:
        return 0.0
    t = abs(r) * np.sqrt((n - 2) / (1.0 - r * r))
    return float(2.0 * t_dist.sf(t, df=n - 2))


@dataclass(frozen=True)
class CorrelationMatrix:
    names: tuple[str, ...]
    r: np.ndarray  # symmetric, unit diagonal
    p: np.ndarray  # two-sided, zero diagonal
    significant: np.ndarray  # boolean mask, p < alpha off-diagonal
    alpha: float

    def entry(self, a: str, b: str) -> tuple[float, float]:
        i, j = self.names.index(a), self.names.index(b)
        return float(self.r[i, j]), float(self.p[i, j])


def pairwise_agreement(vectors: dict[str, np.ndarray], alpha: float = 0.05) -> CorrelationMatrix:
    """Pairwise Pearson correlations between per-face score vectors.

    All vectors must be aligned to the same face order and equal length.
    """
    names = tuple(vectors.keys())
    cols = [np.asarray(vectors[n], dtype=float) for n in names]
    n_faces = {c.size for c in cols}
    if len(n_faces) != 1:
        raise ValueError(f"vectors differ in length: {sorted(n_faces)}")
    m = len(names)
    r = np.eye(m)
    p = np.zeros((m, m))
    for i, j in combinations(range(m), 2):
        rij = pearson(cols[i], cols[j])
        pij = pearson_p(rij, cols[i].size)
        r[i, j] = r[j, i] = rij
        p[i, j] = p[j, i] = pij
    sig = (p < alpha) & ~np.eye(m, dtype=bool)
    return CorrelationMatrix(names=names, r=r, p=p, significant=sig, alpha=alpha)


def group_pairwise_rs(matrix: CorrelationMatrix, members: tuple[str, ...]) -> np.ndarray:
    """The off-diagonal correlations among one group of entities."""
    idx = [matrix.names.index(n) for n in members]
    return np.array([matrix.r[i, j] for i, j in combinations(idx, 2)])
