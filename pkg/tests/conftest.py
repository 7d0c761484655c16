import numpy as np
import pytest
from scipy import sparse

from verdoorn.fixture import write_fixture
from verdoorn.weights import SpatialWeights, distance_band, row_standardize


def random_weights(rng, n, threshold=None):
    """Distance-band weights on uniform points in a 100 km square, no islands."""
    while True:
        pts = rng.uniform(0, 100, size=(n, 2))
        t = threshold or rng.uniform(25, 60)
        w = distance_band(pts, t)
        if w.degrees.min() > 0:
            return w


def ring(n):
    b = np.zeros((n, n))
    for i in range(n):
        b[i, (i + 1) % n] = b[i, (i - 1) % n] = 1
    bs = sparse.csr_matrix(b)
    return SpatialWeights(tuple(f"r{i}" for i in range(n)), 1.0, bs, row_standardize(bs))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixture")
    write_fixture(out)
    return out
