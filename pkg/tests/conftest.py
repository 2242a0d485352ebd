import math
from pathlib import Path

import numpy as np
import pytest

from quantprox import InstanceSpec

INSTANCE_DIR = Path(__file__).resolve().parent.parent / "src" / "quantprox" / "instances"


def h2(p):
    """Binary entropy in bits."""
    if p in (0.0, 1.0):
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def random_instance(rng, m=None, n=None):
    """Random feasible instance with source mass bounded away from zero.

    px mixes a Dirichlet draw with the uniform distribution so that
    min px >= 1/(2m); dist has zeros placed to keep small-d thresholds
    feasible for the guaranteed criterion.
    """
    m = int(m if m is not None else rng.integers(2, 5))
    n = int(n if n is not None else rng.integers(2, 5))
    px = 0.5 * rng.dirichlet(np.ones(m)) + 0.5 / m
    dist = rng.random((m, n))
    for x in range(m):
        dist[x, int(rng.integers(0, n))] = 0.0
    return InstanceSpec.from_arrays(px, dist)


def feasible_d(instance, rng=None, quantile=0.5):
    """A threshold at which every source letter has a non-empty ball."""
    row_min = instance.dist.min(axis=1).max()
    upper = float(np.quantile(instance.dist, 0.8))
    if upper <= row_min:
        return float(row_min)
    if rng is None:
        return float(row_min + quantile * (upper - row_min))
    return float(row_min + rng.uniform(0.1, 0.9) * (upper - row_min))


@pytest.fixture(scope="session")
def binary_instance():
    return InstanceSpec.load(INSTANCE_DIR / "binary_hamming.json")


@pytest.fixture(scope="session")
def triangle_instance():
    return InstanceSpec.load(INSTANCE_DIR / "triangle_circulant.json")


@pytest.fixture(scope="session")
def random5_instance():
    return InstanceSpec.load(INSTANCE_DIR / "random_5x5.json")


@pytest.fixture(scope="session")
def instance_suite():
    """The deterministic random suite shared by the acceptance criteria."""
    rng = np.random.default_rng(20240817)
    suite = []
    for k in range(20):
        inst = random_instance(rng)
        d = feasible_d(inst, rng)
        suite.append((inst, d))
    return suite
