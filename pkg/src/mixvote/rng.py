"""Injected randomness.

Every random choice in the library goes through a :class:`RandomSource`.  Two
kinds of draws are distinguished so the auditor can treat them differently:

``randbelow(n)``
    a discrete choice (Fisher-Yates steps, slot permutations, rejection loops)
``scalars(modulus, count)``
    independent uniform coordinates of an Abelian group element
"""

from __future__ import annotations

import random
from typing import Protocol, runtime_checkable


@runtime_checkable
class RandomSource(Protocol):
    def randbelow(self, n: int) -> int: ...

    def scalars(self, modulus: int, count: int) -> list[int]: ...


class SeededSource:
    """Deterministic source backed by :class:`random.Random`."""

    def __init__(self, seed: int | str = 0):
        self.seed = seed
        self._r = random.Random(seed)

    def randbelow(self, n: int) -> int:
        if n < 1:
            raise ValueError("randbelow needs n >= 1")
        return self._r.randrange(n)

    def scalars(self, modulus: int, count: int) -> list[int]:
        r = self._r.randrange
        return [r(modulus) for _ in range(count)]

    def random(self) -> float:
        return self._r.random()

    def fork(self, label: str) -> "SeededSource":
        """Independent child stream, reproducible from (seed, label)."""
        return SeededSource(f"{self.seed}/{label}")

    def __repr__(self):
        return f"SeededSource({self.seed!r})"


class FixedSource:
    """Replays a scripted list of draws; used to pin examples in tests."""

    def __init__(self, draws):
        self._draws = list(draws)
        self._pos = 0

    def _next(self):
        if self._pos >= len(self._draws):
            raise IndexError("scripted randomness exhausted")
        v = self._draws[self._pos]
        self._pos += 1
        return v

    def randbelow(self, n: int) -> int:
        v = self._next()
        if not 0 <= v < n:
            raise ValueError(f"scripted draw {v} outside 0..{n - 1}")
        return v

    def scalars(self, modulus: int, count: int) -> list[int]:
        out = []
        for _ in range(count):
            v = self._next()
            if not 0 <= v < modulus:
                raise ValueError(f"scripted draw {v} outside 0..{modulus - 1}")
            out.append(v)
        return out

    @property
    def exhausted(self) -> bool:
        return self._pos == len(self._draws)
