import math

import numpy as np
import pytest
from hypothesis import strategies as st

from qmodulation.fock import DensityOperator, FockBasis


def random_density(rng, dim, rank=None):
    """Normalised A A^H with complex Gaussian A."""
    rank = rank or dim
    a = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = a @ a.conj().T
    return m / np.trace(m).real


def random_state(rng, n_max, slots=1):
    basis = FockBasis(slots, n_max)
    return DensityOperator(basis, random_density(rng, basis.dim))


def comb_thinning(n, eta):
    return [math.comb(n, j) * eta**j * (1 - eta) ** (n - j) for j in range(n + 1)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def probability_vectors(min_size=2, max_size=4):
    """Hypothesis strategy for strictly positive probability vectors."""
    return st.lists(
        st.floats(min_value=0.01, max_value=1.0), min_size=min_size, max_size=max_size
    ).map(lambda xs: [x / sum(xs) for x in xs])


etas = st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0]) | st.floats(0.0, 1.0)
