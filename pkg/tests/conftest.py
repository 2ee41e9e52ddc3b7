import numpy as np
import pytest
from hypothesis import settings, strategies as st

from arcmatch.arcstr import parse_dotbracket
from arcmatch.instances import random_string

# first calls may load compiled kernels from the numba cache
settings.register_profile("default", deadline=None)
settings.load_profile("default")

NESTED_P = ("CAAUCUGCG", "(.(.).())")
NESTED_Q = ("CAGGAUCUGCG", "(.(.(.))())")


@pytest.fixture
def nested_pair():
    return parse_dotbracket(*NESTED_P), parse_dotbracket(*NESTED_Q)


@st.composite
def nested_strings(draw, max_len=10, alphabet="AU", min_len=0):
    n = draw(st.integers(min_len, max_len))
    n_arcs = draw(st.integers(0, n // 2))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_string(n, np.random.default_rng(seed), n_arcs=n_arcs, alphabet=alphabet)


@st.composite
def gamma_values(draw, max_m=64):
    """A valid Gamma sequence as a list: t <= g[t] <= g[t + 1] <= m (0-based t)."""
    m = draw(st.integers(1, max_m))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_gamma(m, np.random.default_rng(seed))


def random_gamma(m, rng):
    g = np.empty(m, np.int64)
    nxt = m
    for t in range(m - 1, -1, -1):
        g[t] = rng.integers(t, nxt + 1)
        nxt = g[t]
    return g.tolist()
