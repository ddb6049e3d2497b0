"""Deterministic seed derivation.

Every stochastic routine in the package takes an explicit 64-bit seed and
builds its generator through :func:`rng_from_seed` (NumPy PCG64).  Sub-tasks
(realizations, path blocks, per-trajectory coin streams) use seeds derived
with :func:`derive_seed`, which folds indices through SplitMix64.  Results
are therefore independent of scheduling or chunking: task ``k`` always sees
the same stream no matter how many workers run.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One SplitMix64 output step for the state ``x`` (64-bit wraparound)."""
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(seed: int, *path: int) -> int:
    """Derive an independent child seed from ``seed`` and an index path.

    ``derive_seed(s, i, j)`` is the seed of sub-task ``j`` of sub-task ``i``.
    Distinct paths give (statistically) independent streams.
    """
    s = seed & _MASK64
    for k in path:
        s = splitmix64(s ^ splitmix64(k & _MASK64))
    return s


def rng_from_seed(seed: int) -> np.random.Generator:
    """The package-wide generator: PCG64 keyed by a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))
