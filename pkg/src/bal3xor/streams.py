"""Seeded child random streams.

Every random draw in the toolkit comes from a Philox (counter-based) generator
keyed by a ``SeedSequence`` whose entropy is the 64-bit master seed and whose
spawn key is ``(stream, *keys)``, typically ``(stream, n, m, rep)``. Streams are
therefore a pure function of their coordinates: scheduling order and thread
count never change the output.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Optional, Union

import numpy as np

SeedLike = Union[None, int, np.random.Generator]


class Stream(IntEnum):
    """Tags that keep independent consumers on disjoint streams."""

    INSTANCE = 0  # incidence matrix, u, and the coset draw of b
    LABELS = 1  # label template permutation / Bernoulli labels
    ALPHA = 2  # survivor combination
    PERMUTATION = 3  # column permutations for pivot sets
    PREDICTOR = 4  # randomized baseline predictors
    AUX = 5  # tests and ad-hoc experiments


def child_rng(master_seed: int, stream: Stream, *keys: int) -> np.random.Generator:
    """Generator for ``(master_seed, stream, *keys)``, e.g. ``keys = (n, m, rep)``."""
    if not 0 <= master_seed < 2**64:
        raise ValueError(f"master seed must be a 64-bit unsigned integer, got {master_seed}")
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(int(stream),) + tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(seq))


def as_generator(seed: SeedLike = None) -> np.random.Generator:
    """Accept a Generator, an int seed, or None (fresh entropy)."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        return np.random.Generator(np.random.Philox())
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def random_bits(rng: np.random.Generator, k: int, nonzero: bool = False, max_tries: Optional[int] = None) -> np.ndarray:
    """``k`` fair bits; with ``nonzero`` the all-zero vector is rejected."""
    if nonzero and k == 0:
        raise ValueError("no nonzero vector of length 0")
    tries = 0
    while True:
        bits = rng.integers(0, 2, size=k, dtype=np.uint8)
        if not nonzero or bits.any():
            return bits
        tries += 1
        if max_tries is not None and tries >= max_tries:
            raise RuntimeError("could not draw a nonzero vector")
