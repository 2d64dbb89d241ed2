"""Tiny deterministic RNG used by the simulators.

splitmix64 with a Box-Muller gaussian on top.  Implemented by hand (rather
than via random/numpy) so the compiled loop kernel can reproduce the exact
same draw sequence bit-for-bit.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_TWO_PI = 2.0 * math.pi


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def gauss(self) -> float:
        """Standard normal draw (Box-Muller, sine branch discarded)."""
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(_TWO_PI * u2)
