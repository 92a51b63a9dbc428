"""Deterministic sub-seed derivation.

Per-cycle randomness is seeded as mix64(run_seed, cycle_index) with a
splitmix64-style finalizer, so cycle n of any run can be regenerated in
isolation.  The mixing function is part of the file-format/reproducibility
contract and must not change.
"""

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(seed: int, n: int) -> int:
    """Stable 64-bit mix of a run seed and a cycle index."""
    z = (seed ^ (n * _GOLDEN)) & _MASK
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK
