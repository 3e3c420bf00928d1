import numpy as np
import pytest

from quadsub.generate import random_instance


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def random_trs_instances(rng):
    return [random_instance("trs", int(rng.integers(1, 7)), rng) for _ in range(60)]


@pytest.fixture
def random_prs_instances(rng):
    out = []
    for i in range(60):
        n = int(rng.integers(1, 7))
        p = (2.5, 3.0, 4.0)[i % 3]
        sigma = float(rng.uniform(0.5, 2.0))
        out.append(random_instance("prs", n, rng, sigma=sigma, p=p))
    return out
