"""Message log of a protocol run.

Every value that crosses a channel is recorded once as an :class:`Event`.  A
party sees an event iff it is the sender or one of the recipients; the
adversary view is the projection of the log onto corrupted parties
(see :mod:`mixvote.adversary.views`).

Party ids are plain strings: ``"cge"``, ``"receiver"``, ``"server:<id>"``,
``"voter:<i>"``, ``"device:<i>:<j>"`` and ``"F:product"`` for the sealed
group-product functionality.
"""

from __future__ import annotations

import hashlib
import json
from typing import Iterable, NamedTuple

from .groups import GroupElement, encode

KINDS = ("share", "modifier", "perm_announce", "reshare", "delivery", "reply", "mpc")


def server(x: int) -> str:
    return f"server:{x}"


def device(voter: int, j: int) -> str:
    return f"device:{voter}:{j}"


def voter(i: int) -> str:
    return f"voter:{i}"


class Split(tuple):
    """Broadcast payload where recipient number j only receives component j."""


class Event(NamedTuple):
    step: int
    src: str
    dst: object  # str, or a tuple of str for a broadcast
    kind: str
    slot: int | None
    level: int | None
    payload: object

    def recipients(self) -> tuple:
        return self.dst if isinstance(self.dst, tuple) else (self.dst,)

    def seen_by(self, party):
        """What ``party`` observes of this event (None if nothing)."""
        if party == self.src:
            return self.payload
        if isinstance(self.dst, tuple):
            if party not in self.dst:
                return None
            if isinstance(self.payload, Split):
                return self.payload[self.dst.index(party)]
            return self.payload
        return self.payload if party == self.dst else None

    def visible_to(self, parties) -> bool:
        if self.src in parties:
            return True
        if isinstance(self.dst, tuple):
            return any(d in parties for d in self.dst)
        return self.dst in parties


def encode_payload(p):
    if isinstance(p, GroupElement):
        return encode(p)
    if isinstance(p, (tuple, list)):
        return [encode_payload(x) for x in p]
    return p


class Transcript:
    def __init__(self, run_id: str = "run"):
        self.run_id = run_id
        self.events: list[Event] = []

    def emit(self, src, dst, kind, slot=None, level=None, payload=None) -> Event:
        ev = Event(len(self.events), src, dst, kind, slot, level, payload)
        self.events.append(ev)
        return ev

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def of_kind(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def parties(self) -> set:
        out = set()
        for e in self.events:
            out.add(e.src)
            out.update(e.recipients())
        return out

    def record(self, ev: Event) -> dict:
        dst = list(ev.dst) if isinstance(ev.dst, tuple) else ev.dst
        return {
            "run_id": self.run_id,
            "step": ev.step,
            "from": ev.src,
            "to": dst,
            "kind": ev.kind,
            "slot": ev.slot,
            "level": ev.level,
            "payload": encode_payload(ev.payload),
        }

    def iter_jsonl(self) -> Iterable[str]:
        for ev in self.events:
            yield json.dumps(self.record(ev), sort_keys=True, separators=(",", ":"))

    def to_jsonl(self) -> str:
        return "".join(line + "\n" for line in self.iter_jsonl())

    def sha256(self) -> str:
        return hashlib.sha256(self.to_jsonl().encode("utf-8")).hexdigest()

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in self.iter_jsonl():
                fh.write(line + "\n")


def read_jsonl(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
