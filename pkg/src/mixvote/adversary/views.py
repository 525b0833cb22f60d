"""Corruption sets and the projection of a run onto what they observe."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from ..groups import GroupElement, encode
from ..transcript import Split, Transcript, device, server


@dataclass(frozen=True)
class CorruptionSet:
    """Passively corrupted parties.

    ``observer`` names an extra party (the CGE or the receiver) whose view is
    added on top; it does not count against the bound t.
    """

    parties: frozenset
    observer: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "parties", frozenset(self.parties))

    @classmethod
    def of(cls, *parties: str, observer: str | None = None) -> "CorruptionSet":
        return cls(frozenset(parties), observer)

    @property
    def all_parties(self) -> frozenset:
        if self.observer is None:
            return self.parties
        return self.parties | {self.observer}

    def server_ids(self) -> set:
        return {int(p.split(":")[1]) for p in self.parties if p.startswith("server:")}

    def size(self) -> int:
        return len(self.parties)

    def label(self) -> list:
        out = sorted(self.parties)
        if self.observer is not None:
            out = [self.observer] + out
        return out

    def __str__(self):
        return "{" + ", ".join(self.label()) + "}"


class ViewEntry(NamedTuple):
    step: int
    src: str
    dst: object
    kind: str
    slot: object
    level: object
    observed: object


class ViewTranscript(list):
    """Ordered list of :class:`ViewEntry`, plus any side information."""

    def __init__(self, entries=(), side=()):
        super().__init__(entries)
        self.side = tuple(side)

    def key(self) -> tuple:
        """Hashable canonical form (group elements encoded)."""
        return (self.side, tuple((e.step, e.src, e.dst, e.kind, e.slot, e.level, _canon(e.observed)) for e in self))


def _canon(x):
    if isinstance(x, GroupElement):
        return (str(x.spec), x.value)
    if isinstance(x, (tuple, list)):
        return tuple(_canon(y) for y in x)
    return x


def observe(ev, parties: frozenset):
    """What a coalition sees of one event, or None."""
    if ev.src in parties:
        return ev.payload
    dst = ev.dst
    if isinstance(dst, tuple):
        hit = [i for i, d in enumerate(dst) if d in parties]
        if not hit:
            return None
        if isinstance(ev.payload, Split):
            return tuple((i, ev.payload[i]) for i in hit)
        return ev.payload
    return ev.payload if dst in parties else None


def capture(transcript: Transcript, corruption: CorruptionSet, side=()) -> ViewTranscript:
    parties = corruption.all_parties
    if not parties:
        return ViewTranscript((), side)
    out = []
    for ev in transcript.events:
        seen = observe(ev, parties)
        if seen is None:
            continue
        out.append(ViewEntry(ev.step, ev.src, ev.dst, ev.kind, ev.slot, ev.level, seen))
    return ViewTranscript(out, side)


def flatten(view: ViewTranscript, linear_spec=None):
    """Split a view into (structure, coords).

    Elements of ``linear_spec`` become coordinates (one int per digit/bit) and
    are replaced by a marker in the structure; everything else (slots,
    permutations, names) stays in the hashable structure.
    """
    coords: list[int] = []

    def walk(x):
        if isinstance(x, GroupElement):
            if linear_spec is not None and x.spec == linear_spec:
                coords.extend(x.value)
                return "#"
            return (str(x.spec), x.value)
        if isinstance(x, (tuple, list)):
            return tuple(walk(y) for y in x)
        return x

    struct = []
    for e in view:
        struct.append((e.step, e.src, e.dst, e.kind, e.slot, e.level, walk(e.observed)))
    side = walk(view.side)
    return (side, tuple(struct)), coords


def party_universe(setsystem, v: int, include_devices: bool = True) -> list[str]:
    parties = [server(x) for x in sorted(setsystem.used_servers())]
    if include_devices:
        parties += [device(i, j) for i in range(1, v + 1) for j in range(1, setsystem.t + 2)]
    return parties


def all_subsets(universe: Iterable[str], max_size: int, observer: str | None = None) -> list[CorruptionSet]:
    universe = list(universe)
    out = []
    for k in range(max_size + 1):
        for combo in itertools.combinations(universe, k):
            out.append(CorruptionSet(frozenset(combo), observer))
    return out


def describe(view: ViewTranscript) -> list[dict]:
    """JSON-friendly rendering of a view."""

    def enc(x):
        if isinstance(x, GroupElement):
            return encode(x)
        if isinstance(x, (tuple, list)):
            return [enc(y) for y in x]
        return x

    return [
        {"step": e.step, "from": e.src, "to": list(e.dst) if isinstance(e.dst, tuple) else e.dst,
         "kind": e.kind, "slot": e.slot, "level": e.level, "observed": enc(e.observed)}
        for e in view
    ]
