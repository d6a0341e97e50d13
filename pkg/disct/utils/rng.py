"""
File: rng.py
Description: Seeded random generators. Every stochastic operation takes a base
             seed plus an optional key path (cell, replicate, ...) so replicates
             are reproducible independently of execution order.
"""

import numpy as np


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based Philox generator for (seed, *keys)."""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(sequence))


def child_seed(seed: int, *keys: int) -> int:
    """Derive a plain integer seed for APIs that take one."""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])
