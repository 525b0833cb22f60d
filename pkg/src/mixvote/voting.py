"""Code generation, dispatch and tallying on the CGE side.

The CGE only ever knows tuples by index.  Which voter ends up with which tuple
is decided inside the mix network and never reaches the :class:`CodeBook`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .groups import GroupElement, GroupSpec, digits, encode, inverse, parse, parse_spec, perms, sample_uniform
from .mixnet import (
    ConfigError,
    Engine,
    MixConfig,
    Protocol,
    forward_p2,
    forward_p3,
    reply_p2,
    reply_p3,
)
from .rng import RandomSource
from .setsystem import SetSystem, TransferMode
from .transcript import Transcript
from .voter import Ballot, VoterAgent, cast, check_intent, human_reconstruct, receive_shares

DEFAULT_CODE_DIGITS = 10


class CodeSpaceError(ValueError):
    """The code space cannot hold c*v distinct codes."""


@dataclass(frozen=True)
class SeatMode:
    seats: int | None = None  # None: single-seat

    @property
    def multi(self) -> bool:
        return self.seats is not None

    @classmethod
    def single(cls) -> "SeatMode":
        return cls(None)

    @classmethod
    def multi_seat(cls, s: int) -> "SeatMode":
        if s < 1:
            raise ValueError("a multi-seat election needs at least one seat")
        return cls(s)


@dataclass(frozen=True)
class CodeBook:
    election_id: str
    mode: SeatMode
    spec: GroupSpec
    c: int
    tuples: tuple  # single-seat: v tuples of c codes; multi-seat: v permutations
    index: Mapping = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        if self.index is None and not self.mode.multi:
            idx = {}
            for i, row in enumerate(self.tuples, start=1):
                for cand, code in enumerate(row, start=1):
                    idx[code.value] = (i, cand)
            object.__setattr__(self, "index", idx)

    @property
    def v(self) -> int:
        return len(self.tuples)

    def lookup(self, code: GroupElement):
        """(tuple index, candidate) of a code, or None."""
        if code.spec != self.spec:
            return None
        return self.index.get(code.value)

    def to_json(self) -> dict:
        if self.mode.multi:
            rows = [encode(p) for p in self.tuples]
        else:
            rows = [[encode(x) for x in row] for row in self.tuples]
        return {
            "election": self.election_id,
            "seats": self.mode.seats,
            "c": self.c,
            "carrier": str(self.spec),
            "tuples": rows,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CodeBook":
        spec = parse_spec(obj["carrier"])
        seats = obj.get("seats")
        mode = SeatMode(seats)
        if mode.multi:
            tuples = tuple(parse(spec, p) for p in obj["tuples"])
        else:
            tuples = tuple(tuple(parse(spec, x) for x in row) for row in obj["tuples"])
        return cls(obj.get("election", "election"), mode, spec, int(obj["c"]), tuples)


@dataclass
class TallyResult:
    c: int
    counts: dict
    rejected: int = 0
    cast: int = 0
    seats: int | None = None

    def to_json(self) -> dict:
        out = {str(k): self.counts[k] for k in sorted(self.counts)}
        out["rejected"] = self.rejected
        return out

    def as_multiset(self) -> dict:
        return {k: n for k, n in self.counts.items() if n}


def generate_codes(v: int, c: int, mode: SeatMode, code_spec: GroupSpec | None, rng: RandomSource,
                   election_id: str = "election") -> CodeBook:
    if v < 1 or c < 1:
        raise ValueError("need at least one voter and one candidate")
    if mode.multi:
        if mode.seats > c:
            raise ValueError(f"{mode.seats} seats exceed {c} candidates")
        spec = perms(c)
        return CodeBook(election_id, mode, spec, c, tuple(sample_uniform(spec, rng) for _ in range(v)))
    spec = code_spec if code_spec is not None else digits(DEFAULT_CODE_DIGITS)
    if not spec.abelian:
        raise ValueError("single-seat codes live in an Abelian carrier")
    if spec.order() < c * v:
        raise CodeSpaceError(f"{spec} holds {spec.order()} codes, need {c * v} distinct ones")
    seen = set()
    rows = []
    for _ in range(v):
        row = []
        for _ in range(c):
            while True:
                x = sample_uniform(spec, rng)
                if x.value not in seen:
                    break
            seen.add(x.value)
            row.append(x)
        rows.append(tuple(row))
    return CodeBook(election_id, mode, spec, c, tuple(rows))


def mix_config_for(book: CodeBook, setsystem: SetSystem, transfer_mode=TransferMode.RESHARE,
                   engine=Engine.IDEAL) -> MixConfig:
    if book.mode.multi:
        return MixConfig(setsystem, book.spec, Protocol.P3, TransferMode.RESHARE, 1, engine)
    return MixConfig(setsystem, book.spec, Protocol.P2, transfer_mode, book.c, engine)


def dispatch(book: CodeBook, config: MixConfig, rng: RandomSource, transcript: Transcript | None = None):
    """Push the codebook through the mix.  Returns a ForwardResult whose
    ``delivered[i]`` is what voter i+1 receives."""
    if book.mode.multi:
        if config.protocol is not Protocol.P3:
            raise ConfigError("protocol", "multi-seat elections run over the permutation protocol")
        return forward_p3(list(book.tuples), config, rng, transcript)
    if config.protocol is not Protocol.P2:
        raise ConfigError("protocol", "single-seat elections run over the Abelian bundled protocol")
    if config.bundle_width != book.c:
        raise ConfigError("bundle_width", f"bundle width {config.bundle_width} != {book.c} candidates")
    return forward_p2([list(r) for r in book.tuples], config, rng, transcript)


def decode_and_tally(recovered: Sequence, book: CodeBook) -> TallyResult:
    """Count recovered (original slot, code-or-image) pairs."""
    counts = {k: 0 for k in range(1, book.c + 1)}
    res = TallyResult(book.c, counts, 0, 0, book.mode.seats)
    for slot, val in recovered:
        res.cast += 1
        if book.mode.multi:
            if not isinstance(val, int) or not 1 <= val <= book.c or not 1 <= slot <= book.v:
                res.rejected += 1
                continue
            cand = inverse(book.tuples[slot - 1]).value[val - 1]
        else:
            hit = book.lookup(val) if isinstance(val, GroupElement) else None
            if hit is None or hit[0] != slot:
                res.rejected += 1
                continue
            cand = hit[1]
        counts[cand] += 1
    return res


@dataclass
class ElectionOutcome:
    book: CodeBook
    config: MixConfig
    forward: object
    ballots: list
    recovered: list
    tally: TallyResult
    transcript: Transcript


def normalize_intents(intents, v: int) -> dict:
    """``{voter_id: [candidates]}`` with int keys 1..v; missing voters abstain."""
    out = {i: () for i in range(1, v + 1)}
    for k, cands in dict(intents).items():
        i = int(k)
        if not 1 <= i <= v:
            raise ValueError(f"voter id {k!r} outside 1..{v}")
        if isinstance(cands, int):
            cands = [cands]
        out[i] = tuple(int(x) for x in cands)
    return out


def run_election(v: int, c: int, mode: SeatMode, setsystem: SetSystem, intents, rng: RandomSource, *,
                 transfer_mode=TransferMode.RESHARE, code_spec: GroupSpec | None = None,
                 engine=Engine.IDEAL, run_id: str = "run", voter_order: Sequence[int] | None = None,
                 error_rate: float = 0.0, voter_rng: RandomSource | None = None) -> ElectionOutcome:
    """Generate codes, mix them out, let every voter reconstruct and cast, and tally."""
    intents = normalize_intents(intents, v)
    for i, choice in intents.items():
        check_intent(choice, c, mode.seats)
    tr = Transcript(run_id)
    book = generate_codes(v, c, mode, code_spec, rng)
    cfg = mix_config_for(book, setsystem, transfer_mode, engine)
    fwd = dispatch(book, cfg, rng, tr)

    order = list(voter_order) if voter_order is not None else list(range(1, v + 1))
    if sorted(order) != list(range(1, v + 1)):
        raise ValueError("voter_order must be a permutation of 1..v")
    ballots: list[Ballot] = []
    for i in order:
        agent = VoterAgent(i, setsystem.t, intents[i], error_rate, voter_rng)
        receive_shares(agent, fwd.delivered[i - 1])
        if not agent.intent:
            continue
        if mode.multi:
            rec = human_reconstruct(agent)
        else:
            rec = human_reconstruct(agent, agent.intent[0])
        ballots.extend(cast(agent, rec))
    ballots.sort(key=lambda bl: (bl.slot, bl.value.value if isinstance(bl.value, GroupElement) else bl.value))

    items = [(bl.slot, bl.value) for bl in ballots]
    if mode.multi:
        recovered = reply_p3(items, fwd.secrets, cfg, tr)
    else:
        recovered = reply_p2(items, fwd.secrets, cfg, tr)
    tally = decode_and_tally(recovered, book)
    return ElectionOutcome(book, cfg, fwd, ballots, recovered, tally, tr)


def expected_tally(intents, v: int, c: int) -> dict:
    counts = {k: 0 for k in range(1, c + 1)}
    for choice in normalize_intents(intents, v).values():
        for x in choice:
            counts[x] += 1
    return counts


def recovered_from_records(records: Sequence[dict], book: CodeBook, receiver: str = "cge") -> list:
    """(original slot, code-or-image) pairs read back from transcript records:
    the reply events that reach the CGE."""
    out = []
    for rec in records:
        if rec.get("kind") != "reply" or rec.get("to") != receiver:
            continue
        val = rec["payload"]
        if not book.mode.multi:
            try:
                val = parse(book.spec, val)
            except (ValueError, TypeError, AttributeError):
                pass  # kept raw; decode_and_tally rejects it
        out.append((rec["slot"], val))
    return out
