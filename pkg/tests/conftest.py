import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lambdamean.linalg import use_backend

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def ginibre(rng, n, m=None):
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2 * n)


@st.composite
def matrices(draw, min_n=2, max_n=6, rank_deficient=True):
    """Random complex square matrix, sometimes with forced rank drop."""
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    t = ginibre(rng, n)
    if rank_deficient and draw(st.booleans()):
        r = draw(st.integers(1, n))
        t = ginibre(rng, n, r) @ ginibre(rng, r, n)
    return t * draw(st.sampled_from([1e-3, 1.0, 10.0]))


lambdas = st.floats(0.0, 1.0, allow_nan=False)
open_lambdas = st.floats(0.01, 0.99, allow_nan=False)


@pytest.fixture(params=["lapack", "native"])
def backend(request):
    with use_backend(request.param):
        yield request.param


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
