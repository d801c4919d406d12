import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from facekit.landmarks import CANONICAL_TEMPLATE, LandmarkSet
from facekit.preprocess import normalize_geometry
from facekit.synthetic import render_face, sample_faces

settings.register_profile(
    "suite",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def template() -> LandmarkSet:
    return LandmarkSet(CANONICAL_TEMPLATE)


@pytest.fixture(scope="session")
def synth_faces():
    """Four jittered synthetic faces with labels, shared across tests."""
    return sample_faces(2, effect=2.0, seed=11)


@pytest.fixture(scope="session")
def normalized_face(synth_faces):
    """One rendered synthetic face brought to canonical geometry."""
    sets, _ = synth_faces
    rng = np.random.default_rng(17)
    image = render_face(sets[0], rng)
    return normalize_geometry(image, sets[0])
