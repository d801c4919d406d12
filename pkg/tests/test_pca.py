import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from facekit.errors import NonFiniteInput, ZeroVariance
from facekit.learn.pca import PcaBasis, pca_fit


def test_components_orthonormal():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(50, 12))
    b = pca_fit(X, variance_target=1.0)
    G = b.components @ b.components.T
    np.testing.assert_allclose(G, np.eye(b.retained), atol=1e-10)


def test_explained_ratio_sums_to_one():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(40, 8))
    b = pca_fit(X)
    assert b.explained_variance_ratio.sum() == pytest.approx(1.0)
    assert (np.diff(b.explained_variance_ratio) <= 1e-12).all()


def test_minimal_retained_count():
    rng = np.random.default_rng(2)
    # construct known variance shares: one dominant direction
    base = rng.normal(size=(200, 3))
    X = base * np.array([10.0, 1.0, 0.1])
    b90 = pca_fit(X, variance_target=0.90)
    ratios = b90.explained_variance_ratio
    cum = np.cumsum(ratios)
    # retained is the smallest m with cum[m-1] >= target
    m = int(np.searchsorted(cum, 0.90 - 1e-12) + 1)
    assert b90.retained == m
    assert cum[b90.retained - 1] >= 0.90 - 1e-9
    if b90.retained > 1:
        assert cum[b90.retained - 2] < 0.90


def test_full_target_reconstructs():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(30, 6))
    b = pca_fit(X, variance_target=1.0)
    Z = b.transform(X)
    np.testing.assert_allclose(b.inverse_transform(Z), X, atol=1e-9)


def test_sign_convention_deterministic():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(25, 7))
    b1 = pca_fit(X)
    b2 = pca_fit(X.copy())
    np.testing.assert_array_equal(b1.components, b2.components)
    for row in b1.components:
        assert row[int(np.argmax(np.abs(row)))] > 0


def test_variance_recovery_on_known_subspace():
    rng = np.random.default_rng(5)
    # rank-2 data embedded in 5 dims plus tiny noise
    latent = rng.normal(size=(300, 2)) * np.array([5.0, 2.0])
    A = rng.normal(size=(2, 5))
    X = latent @ A + rng.normal(scale=1e-6, size=(300, 5))
    b = pca_fit(X, variance_target=0.99)
    assert b.retained == 2


def test_zero_variance_raises():
    X = np.ones((10, 4))
    with pytest.raises(ZeroVariance):
        pca_fit(X)
    with pytest.raises(ZeroVariance):
        pca_fit(np.zeros((1, 4)))


def test_nonfinite_raises():
    X = np.zeros((5, 3))
    X[2, 1] = np.nan
    with pytest.raises(NonFiniteInput):
        pca_fit(X)


def test_bad_target_raises():
    rng = np.random.default_rng(6)
    X = rng.normal(size=(10, 3))
    with pytest.raises(ValueError):
        pca_fit(X, variance_target=0.0)
    with pytest.raises(ValueError):
        pca_fit(X, variance_target=1.5)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.5, 1.0))
def test_transform_matches_projection(seed, target):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(20, 5))
    b = pca_fit(X, variance_target=target)
    Z = b.transform(X)
    np.testing.assert_allclose(Z, (X - b.mean) @ b.components.T, atol=1e-12)
    assert Z.shape == (20, b.retained)
