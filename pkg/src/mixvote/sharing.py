"""(t+1)-out-of-(t+1) sharing over the carrier groups.

Abelian carriers use additive sharing: the first t shares are uniform and the
last one is the residual.  Permutations use multiplicative sharing, where the
secret is the left-to-right composition ``s_1 . s_2 . ... . s_{t+1}``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .groups import GroupElement, GroupSpec, encode, inverse, op, parse, product, sample_uniform
from .rng import RandomSource


class Scheme(str, enum.Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"


class SharingError(ValueError):
    pass


def default_scheme(spec: GroupSpec) -> Scheme:
    return Scheme.ADDITIVE if spec.abelian else Scheme.MULTIPLICATIVE


@dataclass(frozen=True)
class ShareBundle:
    spec: GroupSpec
    shares: tuple
    scheme: Scheme

    def __post_init__(self):
        object.__setattr__(self, "shares", tuple(self.shares))
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.scheme is Scheme.ADDITIVE and not self.spec.abelian:
            raise SharingError("additive sharing needs an Abelian carrier")
        if self.scheme is Scheme.MULTIPLICATIVE and self.spec.abelian:
            raise SharingError("multiplicative sharing is reserved for permutations")
        for s in self.shares:
            if s.spec != self.spec:
                raise SharingError(f"share {s!r} does not belong to {self.spec}")

    @property
    def t(self) -> int:
        return len(self.shares) - 1

    def __len__(self):
        return len(self.shares)

    def __getitem__(self, j):
        return self.shares[j]

    def to_json(self) -> dict:
        return {"scheme": self.scheme.value, "shares": [encode(s) for s in self.shares]}

    @classmethod
    def from_json(cls, spec: GroupSpec, obj: dict) -> "ShareBundle":
        return cls(spec, [parse(spec, s) for s in obj["shares"]], obj["scheme"])


@dataclass(frozen=True)
class ReshareMatrix:
    """Row j holds the subshares of old share j; column i compresses to new share i."""

    subshares: tuple
    sender: object = None
    receiver: object = None

    def row(self, j: int) -> tuple:
        return self.subshares[j]

    def column(self, i: int) -> tuple:
        return tuple(r[i] for r in self.subshares)


def share(secret: GroupElement, t: int, rng: RandomSource, scheme: Scheme | None = None) -> ShareBundle:
    if t < 0:
        raise SharingError("t must be non-negative")
    spec = secret.spec
    scheme = Scheme(scheme) if scheme is not None else default_scheme(spec)
    if (scheme is Scheme.ADDITIVE) != spec.abelian:
        raise SharingError(f"{scheme.value} sharing does not fit carrier {spec}")
    drawn = [sample_uniform(spec, rng) for _ in range(t)]
    if not drawn:
        return ShareBundle(spec, (secret,), scheme)
    last = op(inverse(product(drawn)), secret)
    return ShareBundle(spec, tuple(drawn) + (last,), scheme)


def reconstruct(bundle: ShareBundle, expected_t: int | None = None) -> GroupElement:
    if not bundle.shares:
        raise SharingError("cannot reconstruct from an empty bundle")
    if expected_t is not None and len(bundle.shares) != expected_t + 1:
        raise SharingError(f"incomplete bundle: {len(bundle.shares)} of {expected_t + 1} shares")
    return product(bundle.shares)


def redistribute(bundle: ShareBundle, rng: RandomSource, sender=None, receiver=None):
    """Reshare every old share to t+1 fresh subshares and compress the columns.

    Returns ``(ReshareMatrix, new_bundle)``.
    """
    if bundle.scheme is not Scheme.ADDITIVE:
        raise SharingError("redistribution is only defined for additive sharing")
    t = bundle.t
    rows = tuple(share(s, t, rng).shares for s in bundle.shares)
    new = tuple(product([r[i] for r in rows]) for i in range(t + 1))
    return ReshareMatrix(rows, sender, receiver), ShareBundle(bundle.spec, new, bundle.scheme)


def apply_modifier(bundle: ShareBundle, modifier_shares: Sequence[GroupElement]) -> ShareBundle:
    """Share-wise ``omega_j . pi_j``; the result shares ``omega . pi``."""
    if bundle.scheme is not Scheme.ADDITIVE:
        raise SharingError("share-wise modification needs additive sharing")
    if len(modifier_shares) != len(bundle.shares):
        raise SharingError(f"expected {len(bundle.shares)} modifier shares, got {len(modifier_shares)}")
    return ShareBundle(bundle.spec, tuple(op(w, p) for w, p in zip(modifier_shares, bundle.shares)), bundle.scheme)
