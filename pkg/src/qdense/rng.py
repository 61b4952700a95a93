"""Deterministic 64-bit LCG shared by every sampling code path.

The Python and compiled training kernels must consume identical random
streams so their pair sequences match bit for bit. ``random.Random`` and
numpy's generators have no such cross-implementation contract, so this
module pins one: Knuth's MMIX multiplier/increment on 64-bit wrapping
state, doubles built from the top 53 bits.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_MUL = 6364136223846793005
_INC = 1442695040888963407
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def seed_state(seed: int) -> int:
    """Spread a small seed over 64 bits (splitmix64 finalizer)."""
    z = (seed + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class Lcg:
    """Minimal uniform generator over the pinned stream.

    The state attribute is exposed so kernels can hand the stream back and
    forth across chunk boundaries without losing position.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int = 1, *, raw_state: int | None = None):
        self.state = seed_state(seed) if raw_state is None else raw_state & _MASK

    def next_u64(self) -> int:
        self.state = (self.state * _MUL + _INC) & _MASK
        return self.state

    def uniform(self) -> float:
        """Next double in [0, 1)."""
        return (self.next_u64() >> 11) * _INV_2_53

    def randint(self, n: int) -> int:
        """Next integer in [0, n). Uses the same draw shape as the kernels."""
        return int(self.uniform() * n)
