"""Deterministic per-case seed derivation.

Derived seeds are a pure function of (master seed, indices), so growing a
trial count never reshuffles earlier cases.
"""

import numpy as np


def derive_seed(master: int, *indices: int) -> int:
    """A 32-bit seed derived from a master seed and case indices."""
    ss = np.random.SeedSequence((int(master),) + tuple(int(i) for i in indices))
    return int(ss.generate_state(1)[0])
