"""Counter-based random streams keyed by (seed, index...).

Every Monte Carlo trial and sample path draws from its own Philox stream, so
results are bitwise reproducible regardless of batching or scheduling order.
"""

from __future__ import annotations

import numpy as np


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the given seed and integer key path."""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))
