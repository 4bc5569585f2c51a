"""Seeded samplers for S^2, S^3, SO(3) and the space of orthogonal pairs.

Streams come from numpy's counter-based Philox generator keyed by
``(master seed, suite index, shard index)``, so every suite draws the same
numbers regardless of which other suites run.
"""

import numpy as np

from . import kernels
from .so3 import PerpPair
from .sphere_pairs import PairPoint

RNG_ALGORITHM = "numpy.random.Philox(SeedSequence([seed, suite_index, shard_index]))"


def make_rng(seed, suite_index=0, shard_index=0):
    ss = np.random.SeedSequence([int(seed), int(suite_index), int(shard_index)])
    return np.random.Generator(np.random.Philox(ss))


def _unit_normal(rng, n, dim):
    shape = (dim,) if n is None else (n, dim)
    x = rng.standard_normal(shape)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def sample_sphere(rng, n=None):
    return _unit_normal(rng, n, 3)


def sample_s3(rng, n=None):
    return _unit_normal(rng, n, 4)


def sample_so3(rng, n=None):
    return kernels.spin_cover(sample_s3(rng, n))


def sample_perp(rng, n=None):
    R = sample_so3(rng, n)
    return PerpPair(np.ascontiguousarray(R[..., :, 1]), np.ascontiguousarray(R[..., :, 2]))


def sample_pairs(rng, n=None):
    return PairPoint(sample_sphere(rng, n), sample_sphere(rng, n))
