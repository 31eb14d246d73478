import itertools

import numpy as np
import pytest


def enumerate_subset_sums(values):
    """Brute-force oracle: count bitstrings per weighted sum."""
    counts = np.zeros(sum(values) + 1, dtype=np.int64)
    for bits in itertools.product((0, 1), repeat=len(values)):
        counts[sum(b * v for b, v in zip(bits, values))] += 1
    return counts


def random_unit_vector(rng, n, complex_=True):
    v = rng.normal(size=n) + (1j * rng.normal(size=n) if complex_ else 0)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
