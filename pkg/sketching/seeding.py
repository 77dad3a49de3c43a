"""Named PCG64 sub-streams spawned from the one user seed."""
import numpy as np

FEATURE_MAP = 0
RESERVOIRS = 1
SYNTHETIC_DATA = 2
TEST_CARVE_OUT = 3
BENCHMARK_CELL = 4


def substream(seed, stream, *extra):
    """Return a fresh Generator for (seed, stream, *extra)."""
    if seed is None or int(seed) < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
    sequence = np.random.SeedSequence(int(seed), spawn_key=(stream, *extra))
    return np.random.Generator(np.random.PCG64(sequence))


def cell_seed(master_seed, index):
    """Derive the integer seed of benchmark cell `index` from the master seed."""
    rng = substream(master_seed, BENCHMARK_CELL, index)
    return int(rng.integers(0, 2**31 - 1))
