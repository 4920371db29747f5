"""Deterministic derivation of child seeds for nested experiment parts.

Every randomized component takes a plain integer seed; campaigns derive
per-cell/per-trial children from one root so that reruns, reorderings, and
partial reruns all see identical streams.
"""

import numpy as np


def derive_seed(root, *key):
    """Stable 64-bit child seed for a root seed and an integer key path."""
    ss = np.random.SeedSequence(int(root), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def rng_for(root, *key):
    """Generator seeded by derive_seed(root, *key)."""
    return np.random.default_rng(derive_seed(root, *key))
