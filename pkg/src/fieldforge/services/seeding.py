"""
Seed handling

numpy only seeds from non-negative integers, so seeds and key words of any
sign are folded into unsigned 64-bit words first. Non-negative seeds below
2**64 map to themselves.
"""

import numpy as np

SEED_MASK = 0xFFFF_FFFF_FFFF_FFFF


def seed_sequence(*words: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(w) & SEED_MASK for w in words])


def seeded_rng(*words: int) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(*words))
