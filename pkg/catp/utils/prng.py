"""
SplitMix64 stream with Box-Muller normals.

The generator is small enough to reimplement bit-exactly in any language, which
keeps generated fixtures portable. Evaluation order is fixed: uniforms are the
top 53 bits of each 64-bit output, and each Box-Muller pair consumes two
uniforms (u1 then u2) and yields the cosine draw before the sine draw.
"""

import math
from typing import Optional, Tuple

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
TWO_PI = 2.0 * math.pi


def mix64(z: int) -> int:
    """SplitMix64 output finalizer."""
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *path: int) -> int:
    """Seed of an independent substream, e.g. derive_seed(seed, layer, head)."""
    state = seed & MASK64
    for index in path:
        state = mix64((state + GAMMA * (index + 1)) & MASK64)
    return state


class SplitMix64:
    """Deterministic 64-bit generator; one instance per substream."""

    def __init__(self, seed: int):
        self.state = seed & MASK64
        self._spare: Optional[float] = None

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def next_uniform(self) -> float:
        """Uniform in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def next_gaussian_pair(self) -> Tuple[float, float]:
        u1 = 1.0 - self.next_uniform()  # (0, 1], keeps log finite
        u2 = self.next_uniform()
        radius = math.sqrt(-2.0 * math.log(u1))
        angle = TWO_PI * u2
        return radius * math.cos(angle), radius * math.sin(angle)

    def next_gaussian(self) -> float:
        if self._spare is not None:
            value, self._spare = self._spare, None
            return value
        value, self._spare = self.next_gaussian_pair()
        return value

    def normal(self, shape: Tuple[int, ...]) -> np.ndarray:
        """Standard normal float64 array, filled in row-major order."""
        count = math.prod(shape)
        values = np.fromiter(
            (self.next_gaussian() for _ in range(count)), dtype=np.float64, count=count
        )
        return values.reshape(shape)
