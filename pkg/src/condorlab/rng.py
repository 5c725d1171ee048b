"""Deterministic random-stream derivation.

Every stochastic component draws from a counter-based Philox generator keyed
by an integer tuple (seed, stream-index, ...).  Identical keys always yield
the identical stream, independent of how work is batched across workers.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def substream(*keys) -> np.random.Generator:
    """Return a fresh generator for the stream identified by ``keys``.

    Keys are folded into a SeedSequence so distinct tuples map to
    statistically independent Philox streams.
    """
    entropy = [int(k) & _MASK64 for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def derive_seed(*keys) -> int:
    """Collapse a key tuple into a single 64-bit seed."""
    entropy = [int(k) & _MASK64 for k in keys]
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint64)
    return int(state[0])
