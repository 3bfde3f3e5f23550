"""Seed handling: every random choice derives from one master seed via keyed substreams."""
import numpy as np


def seed_sequence(seed, *key):
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(key))
    if seed is None:
        seed = 0
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence(seed, spawn_key=tuple(key))


def substream(seed, *key):
    """Independent PCG64 generator for ``(seed, *key)``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *key)))


def derive_seed(seed, *key):
    """A 63-bit integer seed for ``(seed, *key)`` that can be passed on the command line."""
    return int(seed_sequence(seed, *key).generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
