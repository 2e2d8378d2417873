"""Portable seeded pseudo-random generator.

SplitMix64 with its standard published constants, so any implementation
in any language reproduces the same stream bit-for-bit from the same
64-bit seed. Sub-streams are derived by hashing (seed, ordinal), never by
sharing a generator across tasks.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4B7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return _mix(self.state)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n); modulo reduction, bias negligible for small n."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n


def derive_seed(seed: int, ordinal: int) -> int:
    """Independent sub-seed for task `ordinal` of a run seeded with `seed`."""
    return _mix((seed & MASK64) ^ ((ordinal * GOLDEN_GAMMA) & MASK64))


def seed_from_text(text: str) -> int:
    """Stable 64-bit seed from a string (e.g. a report id)."""
    acc = 0
    for byte in text.encode("utf-8"):
        acc = _mix((acc + byte + GOLDEN_GAMMA) & MASK64)
    return acc
