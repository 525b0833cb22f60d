"""Walking the randomness of a protocol run.

A run is a deterministic function of the values its :class:`RandomSource`
returns.  :func:`walk_tree` replays the run once for every possible sequence of
draws (depth-first, odometer style), so each leaf is one equally specified
randomness vector with probability ``1 / prod(arities)``.

:class:`ProbeSource` serves the affine method: discrete draws are forced from a
prefix, scalar draws come from a caller-supplied function.
"""

from __future__ import annotations

import random
from typing import Callable


class Intractable(RuntimeError):
    """The enumeration would exceed its state budget."""


class TreeSource:
    __slots__ = ("prefix", "values", "arities", "reverse")

    def __init__(self, prefix, reverse: bool = False):
        self.prefix = prefix
        self.values: list[int] = []
        self.arities: list[int] = []
        self.reverse = reverse

    def _draw(self, n: int) -> int:
        pos = len(self.values)
        v = self.prefix[pos] if pos < len(self.prefix) else 0
        self.values.append(v)
        self.arities.append(n)
        return n - 1 - v if self.reverse else v

    randbelow = _draw

    def scalars(self, modulus: int, count: int) -> list[int]:
        return [self._draw(modulus) for _ in range(count)]


def _advance(values, arities):
    i = len(values) - 1
    while i >= 0 and values[i] == arities[i] - 1:
        i -= 1
    if i < 0:
        return None
    return values[:i] + [values[i] + 1]


def tree_size(fn: Callable, reverse: bool = False) -> int:
    """Leaf count of a uniform tree, estimated from the first path."""
    src = TreeSource([], reverse)
    fn(src)
    n = 1
    for a in src.arities:
        n *= a
    return n


def walk_tree(fn: Callable, budget: int | None = None, reverse: bool = False):
    """Yield ``(result, denominator)`` for every leaf of the draw tree."""
    prefix: list[int] = []
    count = 0
    while prefix is not None:
        src = TreeSource(prefix, reverse)
        out = fn(src)
        count += 1
        if budget is not None and count > budget:
            raise Intractable(f"more than {budget} randomness states")
        den = 1
        for a in src.arities:
            den *= a
        yield out, den
        prefix = _advance(src.values, src.arities)


class ProbeSource:
    """Discrete draws forced from ``prefix`` (0 beyond it); scalar draw number u
    of modulus q returns ``scalar_fn(u, q)``."""

    __slots__ = ("prefix", "values", "arities", "scalar_fn", "moduli", "reverse")

    def __init__(self, prefix, scalar_fn, reverse: bool = False):
        self.prefix = prefix
        self.values: list[int] = []
        self.arities: list[int] = []
        self.scalar_fn = scalar_fn
        self.moduli: list[int] = []
        self.reverse = reverse

    def randbelow(self, n: int) -> int:
        pos = len(self.values)
        v = self.prefix[pos] if pos < len(self.prefix) else 0
        self.values.append(v)
        self.arities.append(n)
        return n - 1 - v if self.reverse else v

    def scalars(self, modulus: int, count: int) -> list[int]:
        out = []
        for _ in range(count):
            u = len(self.moduli)
            self.moduli.append(modulus)
            out.append(self.scalar_fn(u, modulus) % modulus)
        return out


def zeros(u, q):
    return 0


def unit(pos):
    return lambda u, q: 1 if u == pos else 0


def from_vector(vec):
    return lambda u, q: vec[u]


def walk_discrete(fn: Callable, budget: int | None = None, reverse: bool = False):
    """Yield ``(prefix, arities, moduli)`` for every branch of the discrete draws,
    with all scalar draws pinned to zero."""
    prefix: list[int] = []
    count = 0
    while prefix is not None:
        src = ProbeSource(prefix, zeros, reverse)
        fn(src)
        count += 1
        if budget is not None and count > budget:
            raise Intractable(f"more than {budget} discrete branches")
        yield list(src.values), list(src.arities), list(src.moduli)
        prefix = _advance(src.values, src.arities)


def check_rng(seed=12345) -> random.Random:
    """Fixed generator for the affinity spot checks (keeps audits deterministic)."""
    return random.Random(seed)
