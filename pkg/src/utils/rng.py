"""Deterministic random streams.

Every random draw in the package goes through an explicit
``numpy.random.Generator``. Independent streams (one per trial, one per
bidder) are spawned from a master seed with ``SeedSequence`` spawn keys, so
results do not depend on thread scheduling.
"""

from __future__ import annotations

import numpy as np


def derive_seed(master_seed: int, *keys: int) -> int:
    """Return a 63-bit integer seed for the stream ``(master_seed, *keys)``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(2, dtype=np.uint64)[0] >> np.uint64(1))


def derive_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Return the generator for the stream ``(master_seed, *keys)``.

    Args:
        master_seed: Run-level seed.
        *keys: Stream coordinates, e.g. ``(trial,)`` or ``(trial, bidder)``.

    Returns:
        A fresh PCG64 generator; equal arguments give identical streams.
    """
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.default_rng(ss)
