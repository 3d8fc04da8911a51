"""Keyed counter-based random streams.

Every random draw in a simulation is addressed by
``(master_seed, label, step, robot, counter)`` and produced by hashing that
key with BLAKE2b (8-byte digest, personalisation ``b"dgather-rng-v1"``).
Draws therefore do not depend on the order in which other draws were made,
and the same key gives the same 64-bit word on every platform.

Test vectors (``Stream(seed, label, step, robot).next_u64()`` for the first
counter value)::

    Stream(0, "visibility", 0, 0)  -> 0x8f20778c55f6e63e
    Stream(42, "motion", 7, 3)     -> 0x2d499c0ccef04826
    Stream(2**64 - 1, "k", -1, -1) -> 0xd274b4624a68d8ae
"""

from __future__ import annotations

import hashlib
import struct
from typing import Sequence, TypeVar

T = TypeVar("T")

_MASK64 = (1 << 64) - 1
_PERSON = b"dgather-rng-v1"
_KEY = struct.Struct("<QqqQ")


def draw_u64(seed: int, label: str, step: int, robot: int, counter: int) -> int:
    """The 64-bit word at one address of the keyed stream."""
    h = hashlib.blake2b(digest_size=8, person=_PERSON)
    h.update(label.encode("utf-8"))
    h.update(b"\x00")
    h.update(_KEY.pack(seed & _MASK64, step, robot, counter))
    return int.from_bytes(h.digest(), "little")


class Stream:
    """Sequential reader over one ``(seed, label, step, robot)`` sub-stream."""

    __slots__ = ("seed", "label", "step", "robot", "counter")

    def __init__(self, seed: int, label: str, step: int = 0, robot: int = 0):
        self.seed = seed
        self.label = label
        self.step = step
        self.robot = robot
        self.counter = 0

    def next_u64(self) -> int:
        value = draw_u64(self.seed, self.label, self.step, self.robot, self.counter)
        self.counter += 1
        return value

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % n

    def randint(self, lo: int, hi: int) -> int:
        """Integer in the closed range [lo, hi]."""
        return lo + self.randbelow(hi - lo + 1)

    def sample(self, items: Sequence[T], k: int) -> list[T]:
        """``k`` distinct items by a partial Fisher-Yates shuffle."""
        pool = list(items)
        if not 0 <= k <= len(pool):
            raise ValueError("sample size out of range")
        for i in range(k):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
