"""Reproducible randomness: Philox streams keyed by a SplitMix64 mix.

Every Monte-Carlo trial in this package draws from its own counter-based
Philox stream whose key is `mix64(seed, trial_index)`.  Because the key is
a pure function of (seed, index), results are bitwise reproducible no
matter how trials are scheduled or batched, and extending a stream (asking
for more variates) never changes the variates already produced.

The mixing function is the SplitMix64 finaliser applied to
(seed + (index + 1) * GOLDEN_GAMMA) mod 2^64, with the usual constants
0x9E3779B97F4A7C15, 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(seed: int, index: int = 0) -> int:
    """SplitMix64 finaliser of seed advanced by (index + 1) gammas."""
    z = (int(seed) + (int(index) + 1) * GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """The Philox stream for trial `index` under the master `seed`."""
    return np.random.Generator(np.random.Philox(key=mix64(seed, index)))
