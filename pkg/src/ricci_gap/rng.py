"""SplitMix64: the single seeded generator used for every random family.

The stream is fully specified so other implementations can reproduce it:

* state advances by ``GAMMA = 0x9E3779B97F4A7C15`` (mod 2**64) before each draw;
* the output is ``mix64(state)`` with the Stafford variant-13 finalizer;
* floats take the top 53 bits: ``(x >> 11) * 2**-53``;
* bounded integers reject draws below ``(2**64 - bound) % bound`` and then
  reduce ``x % bound`` (unbiased);
* sub-seeds are ``derive_seed(seed, i, j, ...)``, folding each index in as
  ``h = mix64(h ^ mix64((i + 1) * GAMMA mod 2**64))``.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *indices: int) -> int:
    h = seed & MASK64
    for i in indices:
        h = mix64(h ^ mix64(((i + 1) * GAMMA) & MASK64))
    return h


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        if seed < 0 or seed > MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.state = seed

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def randbelow(self, bound: int) -> int:
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = ((1 << 64) - bound) % bound
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % bound

    def shuffle(self, items: list) -> None:
        # Fisher-Yates, high index first
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]
