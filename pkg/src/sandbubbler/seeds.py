"""Derived-seed plumbing.

Batch experiments need many independent streams that are reproducible
from one master seed.  Seeds are derived by feeding the master seed
plus an integer path (e.g. grid index, image index) into SeedSequence,
so no two paths collide and no stream depends on iteration order.
"""

from __future__ import annotations

import numpy as np


def child_seed(master: int, *path: int) -> int:
    """A 63-bit seed derived from the master seed and an integer path."""
    ss = np.random.SeedSequence((int(master),) + tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


def child_rng(master: int, *path: int) -> np.random.Generator:
    """Generator seeded from the master seed and an integer path."""
    ss = np.random.SeedSequence((int(master),) + tuple(int(p) for p in path))
    return np.random.default_rng(ss)
