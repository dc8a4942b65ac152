"""Seedable 64-bit PRNG with purpose-split streams.

All stochastic behaviour in the package (weight init, synthetic data,
plot jitter) flows through this generator so results are reproducible
across platforms and numpy versions. The core is xorshift64*, seeded
through a splitmix64 scramble so that small or equal-ish user seeds
still give well-separated states. Normal deviates come from the
Box-Muller transform.
"""

from __future__ import annotations

import math

_MASK64 = 0xFFFFFFFFFFFFFFFF


def _splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


class Rng:
    """Deterministic xorshift64* generator.

    `split(tag)` derives an independent stream keyed by a short ASCII
    tag, so e.g. weight initialisation and noise generation never share
    a sequence even when built from the same user seed.
    """

    def __init__(self, seed: int):
        seed &= _MASK64
        # scramble so seed=0 / consecutive seeds do not yield weak states
        _, state = _splitmix64(seed)
        self._state = state or 0x9E3779B97F4A7C15
        self._spare_normal: float | None = None

    def split(self, tag: str) -> "Rng":
        """Derive an independent generator keyed by `tag`."""
        h = self._state
        for ch in tag.encode("utf-8"):
            h, out = _splitmix64(h ^ ch)
            h ^= out
        child = Rng(0)
        child._state = h or 0x9E3779B97F4A7C15
        return child

    def next_u64(self) -> int:
        x = self._state
        x ^= (x >> 12)
        x ^= (x << 25) & _MASK64
        x ^= (x >> 27)
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform draw in [lo, hi); 53-bit resolution."""
        u = (self.next_u64() >> 11) * 2.0 ** -53
        return lo + (hi - lo) * u

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Standard Box-Muller; the paired deviate is cached."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
        else:
            # u1 in (0, 1] so log() is finite
            u1 = ((self.next_u64() >> 11) + 1) * 2.0 ** -53
            u2 = (self.next_u64() >> 11) * 2.0 ** -53
            r = math.sqrt(-2.0 * math.log(u1))
            z = r * math.cos(2.0 * math.pi * u2)
            self._spare_normal = r * math.sin(2.0 * math.pi * u2)
        return mu + sigma * z

    def uniforms(self, n: int, lo: float = 0.0, hi: float = 1.0) -> list[float]:
        return [self.uniform(lo, hi) for _ in range(n)]

    def normals(self, n: int, mu: float = 0.0, sigma: float = 1.0) -> list[float]:
        return [self.normal(mu, sigma) for _ in range(n)]
