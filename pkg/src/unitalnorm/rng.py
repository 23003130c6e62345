"""Seeded randomness.

All randomness in the toolkit flows from a single 64-bit seed through the
counter-based Philox generator, so results are reproducible bit for bit and
independent of evaluation order across subsystems: each subsystem draws from
its own stream derived from ``(seed, stream)``.
"""

import numpy as np

# Stream ids, one per consumer, so adding draws in one subsystem never
# perturbs another.
STREAM_FAMILY_SOLVE = 1
STREAM_FAMILY_VERIFY = 2
STREAM_NORM_VERIFY = 3
STREAM_FUNCTOR = 4
STREAM_REG_NOISE = 5
STREAM_ANTIWEDGE = 6
STREAM_TESTS = 7


def make_rng(seed, stream=0):
    """Counter-based generator for the given seed and stream id."""
    key = (int(seed) << 64) + int(stream)
    return np.random.Generator(np.random.Philox(key=key))


def sample_ball(rng, dim):
    """Uniform draw from the closed unit ball in ``dim`` dimensions."""
    g = rng.standard_normal(dim)
    norm = np.linalg.norm(g)
    while norm == 0.0:
        g = rng.standard_normal(dim)
        norm = np.linalg.norm(g)
    radius = rng.random() ** (1.0 / dim)
    return radius * g / norm
