import numpy as np
import pytest

from htquant.corpus import load_corpus
from htquant.imageio import resize_bilinear


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def thumb32(corpus):
    """Cameraman reduced to 32x32 with the CLI's bilinear resize."""
    return resize_bilinear(corpus["camera"], 32)


def smooth_image(rng, h, w, scale=0.02):
    """Random plane with small horizontal differences (no clipping under gains 1,8,4,8)."""
    base = rng.uniform(0.2, 0.8, size=(h, 1))
    steps = rng.uniform(-scale, scale, size=(h, w))
    return np.clip(base + np.cumsum(steps, axis=1), 0.0, 1.0)
