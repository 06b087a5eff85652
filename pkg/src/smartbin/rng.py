"""Deterministic 64-bit random generator for the simulation harness.

The generator is SplitMix64 (Steele, Lea & Flood; Vigna's reference
constants): state advances by the golden-gamma increment 0x9E3779B97F4A7C15
and outputs are finalized with the mix multipliers 0xBF58476D1CE4E5B9 and
0x94D049BB133111EB. Uniform doubles take the top 53 bits; normal deviates
use the Marsaglia polar method, keeping only the first component of each
accepted pair. Each sensor channel draws from its own substream, seeded as
seed XOR channel-index (hand = 1, bin = 2), so adding draws on one channel
never shifts the other.

Pinning the full sampling pipeline like this is what makes simulated traces
byte-identical for a given seed.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """SplitMix64 stream over a 64-bit state."""

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def gauss(self) -> float:
        """Standard normal deviate via the Marsaglia polar method."""
        while True:
            u = 2.0 * self.uniform() - 1.0
            v = 2.0 * self.uniform() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                return u * math.sqrt(-2.0 * math.log(s) / s)


def channel_stream(seed: int, channel_index: int) -> SplitMix64:
    """Independent substream for a sensor channel (seed XOR channel-index)."""
    return SplitMix64((seed & _MASK64) ^ channel_index)
