"""SplitMix64 streams and seed derivation.

Every random bit in the package comes from here so that runs reproduce
bit-exactly on any platform.  A stream seeded with ``s`` has internal state
``s`` and its k-th output (k = 0, 1, ...) is ``mix(s + (k + 1) * GAMMA)``.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

# Fixed tags separating the two graphs of a pair.
TAG_G1 = 0xA0761D6478BD642F
TAG_G2 = 0xE7037ED1A0B428DB


def mix64(z: int) -> int:
    """SplitMix64 output finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Scalar SplitMix64 generator.

    >>> g = SplitMix64(0)
    >>> hex(g.next())
    '0xe220a8397b1dcdaf'
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def __iter__(self):
        return self

    def __next__(self) -> int:
        return self.next()

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next() >> 11) * (1.0 / (1 << 53))


def stream_outputs(seed: int, start: int, stop: int) -> np.ndarray:
    """Outputs ``start..stop-1`` of the stream seeded with ``seed`` (uint64 array)."""
    k = np.arange(start + 1, stop + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = k * np.uint64(GAMMA) + np.uint64(seed & MASK64)
        z ^= z >> np.uint64(30)
        z *= np.uint64(_M1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(_M2)
    z ^= z >> np.uint64(31)
    return z


def derive_seed(seed: int, *path: int) -> int:
    """Child seed for ``path`` under ``seed``.

    Each path component ``p`` is folded in as
    ``x <- mix64(x ^ mix64(p + GAMMA) + GAMMA)``, i.e. the first output of a
    stream seeded with ``x`` xor the first output of a stream seeded with ``p``.
    """
    x = seed & MASK64
    for p in path:
        x = mix64((x ^ mix64(p + GAMMA)) + GAMMA)
    return x
