"""Pytest configuration and shared fixtures."""

import numpy as np
import pytest

from infrastructure.config import settings
from infrastructure.oracle import fronto_parallel_sphere_spec, generate_bundle, static_scene_spec
from tests.fixtures import make_pose


@pytest.fixture(autouse=True)
def quiet_progress():
    """Progress bars off and a single worker unless a test asks otherwise."""
    progress, threads = settings.runtime.progress, settings.runtime.threads
    settings.runtime.progress = False
    settings.runtime.threads = 1
    yield
    settings.runtime.progress, settings.runtime.threads = progress, threads


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def pose():
    return make_pose()


@pytest.fixture(scope="session")
def static_bundle():
    """Small noiseless room seen from 4 views."""
    return generate_bundle(static_scene_spec(num_frames=4, size=32), seed=0, threads=1)


@pytest.fixture(scope="session")
def sphere_spec():
    return fronto_parallel_sphere_spec(num_frames=4, size=32)


@pytest.fixture(scope="session")
def sphere_bundle(sphere_spec):
    """Fixed camera, one sphere moving along +x in front of a wall."""
    return generate_bundle(sphere_spec, seed=0, threads=1)
