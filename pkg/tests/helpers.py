import numpy as np
import pytest

from data import idx

requires_mnist = pytest.mark.skipif(not idx.mnist_available(), reason="MNIST IDX files not present")


def random_signs(rng, m, p):
    return np.where(rng.random((m, p)) < 0.5, 1, -1).astype(np.int8)


def random_labels(rng, G, p):
    """Labels in 1..G; every class present when p >= G"""
    labels = rng.integers(1, G + 1, size=p)
    if p >= G:
        labels[:G] = np.arange(1, G + 1)
    return labels
