"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from specbound import estimators


def random_estimator_spec(rng: np.random.Generator, max_samples: int = 128):
    """Draw one valid (spec, num_samples) pair across all five families."""
    family = rng.integers(0, 5)
    if family == 0:
        return estimators.BiasedPeriodogram(), int(rng.integers(2, max_samples + 1))
    if family == 1:
        return estimators.UnbiasedPeriodogram(), int(rng.integers(2, max_samples + 1))
    if family == 2:
        n = int(rng.integers(4, max_samples + 1))
        half_width = int(rng.integers(1, n + 1))
        window = str(rng.choice(estimators.WINDOW_KINDS))
        return estimators.BlackmanTukey(half_width, window), n
    if family == 3:
        block = int(rng.integers(1, 17))
        blocks = int(rng.integers(1, max(2, max_samples // max(block, 1)) + 1))
        return estimators.Bartlett(block), block * blocks
    segment = int(rng.integers(2, 33))
    hop = int(rng.integers(1, segment + 1))
    segments = int(rng.integers(1, 9))
    taper = str(rng.choice(estimators.WINDOW_KINDS))
    if segment == 2 and taper in ("hann", "triangular", "blackman"):
        taper = "rectangular"  # those tapers vanish identically at length two
    return estimators.Welch(segment, hop, taper), (segments - 1) * hop + segment
