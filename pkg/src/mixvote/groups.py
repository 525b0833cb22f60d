"""Finite-group arithmetic for the three carriers used by the protocols.

* ``Kind.BITSTRING``  -- length-l bit vectors under XOR
* ``Kind.DIGITS``     -- length-l digit vectors under digit-wise addition mod 10
* ``Kind.PERM``       -- permutations of {1..c} under composition

Permutations are stored as 1-based image arrays: ``value[i - 1]`` is the image
of ``i``.  Composition ``op(a, b)`` applies ``b`` first, then ``a``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import reduce
from typing import Iterable

from .rng import RandomSource


class Kind(str, enum.Enum):
    BITSTRING = "bits"
    DIGITS = "digits"
    PERM = "perm"


class IncompatibleOperands(ValueError):
    """Raised when two elements from different groups are combined."""


_MODULUS = {Kind.BITSTRING: 2, Kind.DIGITS: 10}


@dataclass(frozen=True)
class GroupSpec:
    kind: Kind
    param: int

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not isinstance(self.param, int) or self.param < 1:
            raise ValueError(f"group parameter must be a positive integer, got {self.param!r}")

    @property
    def abelian(self) -> bool:
        return self.kind is not Kind.PERM

    @property
    def modulus(self) -> int:
        """Coordinate modulus of an Abelian carrier (2 or 10)."""
        try:
            return _MODULUS[self.kind]
        except KeyError:
            raise TypeError("permutation groups have no coordinate modulus") from None

    def order(self) -> int:
        if self.kind is Kind.PERM:
            n = 1
            for k in range(2, self.param + 1):
                n *= k
            return n
        return self.modulus ** self.param

    def __str__(self):
        return f"{self.kind.value}:{self.param}"


def bits(l: int) -> GroupSpec:
    return GroupSpec(Kind.BITSTRING, l)


def digits(l: int) -> GroupSpec:
    return GroupSpec(Kind.DIGITS, l)


def perms(c: int) -> GroupSpec:
    return GroupSpec(Kind.PERM, c)


def parse_spec(text: str) -> GroupSpec:
    """Inverse of ``str(spec)``: ``"bits:4"``, ``"digits:10"``, ``"perm:3"``."""
    kind, sep, param = text.strip().partition(":")
    if not sep or not param.isdigit():
        raise ValueError(f"not a carrier spec: {text!r}")
    try:
        return GroupSpec(Kind(kind), int(param))
    except ValueError:
        raise ValueError(f"not a carrier spec: {text!r}") from None


class GroupElement:
    __slots__ = ("spec", "value")

    def __init__(self, spec: GroupSpec, value: Iterable[int]):
        value = tuple(int(x) for x in value)
        _check_shape(spec, value)
        self.spec = spec
        self.value = value

    @classmethod
    def _unchecked(cls, spec: GroupSpec, value: tuple) -> "GroupElement":
        el = object.__new__(cls)
        el.spec = spec
        el.value = value
        return el

    def __eq__(self, other):
        if other.__class__ is not GroupElement:
            return NotImplemented
        return self.value == other.value and (self.spec is other.spec or self.spec == other.spec)

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return f"GroupElement({self.spec}, {encode(self)!r})"

    def __str__(self):
        return encode(self)

    def __call__(self, i: int) -> int:
        """Image of candidate/slot ``i`` under a permutation."""
        if self.spec.kind is not Kind.PERM:
            raise TypeError("only permutations can be applied to an index")
        if not 1 <= i <= self.spec.param:
            raise ValueError(f"index {i} outside 1..{self.spec.param}")
        return self.value[i - 1]


def _check_shape(spec: GroupSpec, value: tuple):
    if len(value) != spec.param:
        raise ValueError(f"{spec} element needs {spec.param} entries, got {len(value)}")
    if spec.kind is Kind.PERM:
        if sorted(value) != list(range(1, spec.param + 1)):
            raise ValueError(f"{value} is not a bijection on 1..{spec.param}")
    else:
        m = spec.modulus
        if any(not 0 <= x < m for x in value):
            raise ValueError(f"{spec} entries must lie in 0..{m - 1}")


def element(spec: GroupSpec, value) -> GroupElement:
    """Build an element from an iterable of ints or from its canonical text."""
    if isinstance(value, str):
        return parse(spec, value)
    return GroupElement(spec, value)


# composition memo for the small symmetric groups the auditor enumerates
_COMPOSE: dict = {}
_MEMO_LIMIT = 1 << 16


def op(a: GroupElement, b: GroupElement) -> GroupElement:
    spec = a.spec
    if b.spec is not spec and b.spec != spec:
        raise IncompatibleOperands(f"cannot combine {a.spec} with {b.spec}")
    kind = spec.kind
    if kind is Kind.DIGITS:
        return GroupElement._unchecked(spec, tuple([(x + y) % 10 for x, y in zip(a.value, b.value)]))
    if kind is Kind.BITSTRING:
        return GroupElement._unchecked(spec, tuple([x ^ y for x, y in zip(a.value, b.value)]))
    key = (a.value, b.value)
    img = _COMPOSE.get(key)
    if img is None:
        av = a.value
        img = tuple([av[y - 1] for y in b.value])
        if len(_COMPOSE) < _MEMO_LIMIT:
            _COMPOSE[key] = img
    return GroupElement._unchecked(spec, img)


def inverse(a: GroupElement) -> GroupElement:
    kind = a.spec.kind
    if kind is Kind.BITSTRING:
        return a
    if kind is Kind.DIGITS:
        return GroupElement._unchecked(a.spec, tuple([(10 - x) % 10 for x in a.value]))
    inv = [0] * len(a.value)
    for i, y in enumerate(a.value, start=1):
        inv[y - 1] = i
    return GroupElement._unchecked(a.spec, tuple(inv))


def identity(spec: GroupSpec) -> GroupElement:
    if spec.kind is Kind.PERM:
        return GroupElement._unchecked(spec, tuple(range(1, spec.param + 1)))
    return GroupElement._unchecked(spec, (0,) * spec.param)


def product(elements: Iterable[GroupElement], spec: GroupSpec | None = None) -> GroupElement:
    """Left-to-right fold ``e1 . e2 . ... . en`` (identity for an empty sequence)."""
    elements = list(elements)
    if not elements:
        if spec is None:
            raise ValueError("empty product needs an explicit spec")
        return identity(spec)
    return reduce(op, elements)


def sample_uniform(spec: GroupSpec, rng: RandomSource) -> GroupElement:
    """Uniform element.  Abelian carriers draw independent coordinates; permutations
    use Fisher-Yates, so every draw sequence maps to exactly one permutation."""
    if spec.kind is Kind.PERM:
        img = list(range(1, spec.param + 1))
        for i in range(spec.param - 1, 0, -1):
            j = rng.randbelow(i + 1)
            img[i], img[j] = img[j], img[i]
        return GroupElement._unchecked(spec, tuple(img))
    return GroupElement._unchecked(spec, tuple(rng.scalars(spec.modulus, spec.param)))


def all_elements(spec: GroupSpec) -> list[GroupElement]:
    """Every element of the group, in a fixed order (small groups only)."""
    import itertools

    if spec.order() > 10**6:
        raise ValueError(f"{spec} is too large to list")
    if spec.kind is Kind.PERM:
        it = itertools.permutations(range(1, spec.param + 1))
    else:
        it = itertools.product(range(spec.modulus), repeat=spec.param)
    return [GroupElement._unchecked(spec, tuple(v)) for v in it]


# canonical text encodings

def encode(a: GroupElement) -> str:
    if a.spec.kind is Kind.PERM:
        return ",".join(str(x) for x in a.value)
    return "".join(str(x) for x in a.value)


def parse(spec: GroupSpec, text: str) -> GroupElement:
    text = text.strip()
    if spec.kind is Kind.PERM:
        parts = [p for p in text.split(",") if p.strip()]
        return GroupElement(spec, [int(p) for p in parts])
    if not text.isdigit():
        raise ValueError(f"not a {spec.kind.value} string: {text!r}")
    return GroupElement(spec, [int(ch) for ch in text])
