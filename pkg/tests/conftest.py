import numpy as np
import pytest

from asportfolio.sample import Sample
from asportfolio.scenarios import crafted_archive


def make_sample(X, y):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    return Sample(X, y, y.size)


@pytest.fixture(scope="session")
def crafted():
    return crafted_archive(dim=2, seed=0)


@pytest.fixture(scope="session")
def desk():
    """The default zoo on all 24 functions at n = 2 (720 runs)."""
    from asportfolio.zoo import generate_archive

    return generate_archive(dims=(2,), master_seed=0)
