"""Principal component analysis via singular value decomposition.

The retained count is the smallest number of leading components whose
cumulative explained variance reaches the target (default 95%).  Component
signs follow a fixed convention - the largest-magnitude loading of each
component is positive - so repeated fits are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from facekit.errors import NonFiniteInput, ZeroVariance


@dataclass(frozen=True)
class PcaBasis:
    mean: np.ndarray
    components: np.ndarray  # (retained, p), orthonormal rows
    explained_variance_ratio: np.ndarray  # full spectrum, sums to 1
    retained: int

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) @ self.components.T

    def inverse_transform(self, Z: np.ndarray) -> np.ndarray:
        return np.asarray(Z, dtype=float) @ self.components + self.mean


def pca_fit(X: np.ndarray, variance_target: float = 0.95) -> PcaBasis:
    """Fit a PCA basis retaining the minimal components for the target.

    Requires at least two rows; identical rows (zero total variance) are an
    error because no variance can be explained.
    """
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise NonFiniteInput("pca input")
    n, p = X.shape
    if n < 2:
        raise ZeroVariance(f"need >= 2 rows, got {n}")
    if not (0.0 < variance_target <= 1.0):
        raise ValueError(f"variance_target must be in (0, 1], got {variance_target}")
    mean = X.mean(axis=0)
    centered = X - mean
    # thin SVD: singular values relate to variances by s^2 / (n - 1)
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    variances = svals**2 / (n - 1)
    total = variances.sum()
    if total <= 0.0:
        raise ZeroVariance("all rows identical")
    ratio = variances / total
    cum = np.cumsum(ratio)
    retained = int(np.searchsorted(cum, variance_target - 1e-12) + 1)
    retained = min(retained, len(svals))

    comps = vt[:retained].copy()
    for i in range(retained):
        j = int(np.argmax(np.abs(comps[i])))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    return PcaBasis(
        mean=mean,
        components=comps,
        explained_variance_ratio=ratio,
        retained=retained,
    )
