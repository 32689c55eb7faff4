import numpy as np
import pytest

from gradembed.metric import FiniteMetric, validate
from gradembed.ultrametric import random_tree


def random_metric(n, rng):
    """Random metric via shortest-path repair of a random symmetric matrix."""
    raw = rng.uniform(0.5, 10.0, size=(n, n))
    raw = (raw + raw.T) / 2
    np.fill_diagonal(raw, 0.0)
    d = raw.copy()
    for mid in range(n):
        d = np.minimum(d, d[:, [mid]] + d[[mid], :])
    return validate(d)


def random_profile(labels, k, rng):
    return {lab: int(rng.integers(1, k + 1)) for lab in labels}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def abc_metric():
    """d(a,b)=2, d(a,c)=d(b,c)=8; an ultrametric."""
    d = np.array([[0.0, 2, 8], [2, 0, 8], [8, 8, 0]])
    return validate(d, ["a", "b", "c"])


__all__ = ["random_metric", "random_profile", "random_tree"]
