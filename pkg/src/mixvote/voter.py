"""Simulated human voters.

A voter owns t+1 devices.  Device j receives share j of every code (or of the
single permutation in a multi-seat election).  Reconstruction is done the way a
person would do it by hand: add the digits column by column mod 10, or trace a
candidate through the permutation shares from the last one to the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .groups import GroupElement, GroupSpec, Kind
from .sharing import ShareBundle


class VoterError(ValueError):
    pass


class Ballot(NamedTuple):
    slot: int
    value: object  # GroupElement (code) or int (permutation image)


@dataclass
class VoterAgent:
    voter_id: int
    t: int
    intent: tuple = ()
    error_rate: float = 0.0
    rng: object = None
    devices: list = field(default_factory=list)
    spec: GroupSpec | None = None

    def __post_init__(self):
        self.intent = tuple(self.intent)
        if not 0.0 <= self.error_rate <= 1.0:
            raise VoterError("error_rate must lie in [0, 1]")
        if self.error_rate > 0 and self.rng is None:
            raise VoterError("a voter that can slip needs a random source")
        if not self.devices:
            self.devices = [[] for _ in range(self.t + 1)]

    @property
    def multi_seat(self) -> bool:
        return self.spec is not None and self.spec.kind is Kind.PERM


def receive_shares(agent: VoterAgent, delivery) -> VoterAgent:
    """Put share j of every code on device j.

    ``delivery`` is a list of ShareBundles (one per candidate code) or a single
    ShareBundle holding a permutation.
    """
    bundles = [delivery] if isinstance(delivery, ShareBundle) else list(delivery)
    if not bundles:
        raise VoterError("empty delivery")
    n = agent.t + 1
    for bnd in bundles:
        if len(bnd.shares) != n:
            raise VoterError(f"voter {agent.voter_id}: expected {n} shares per code, got {len(bnd.shares)}")
    agent.spec = bundles[0].spec
    agent.devices = [[bnd.shares[j] for bnd in bundles] for j in range(n)]
    return agent


def _slip(agent: VoterAgent) -> bool:
    if agent.error_rate <= 0:
        return False
    return agent.rng.randbelow(1_000_000) < agent.error_rate * 1_000_000


def human_reconstruct(agent: VoterAgent, candidate_index: int | None = None) -> GroupElement:
    if not agent.devices or any(len(d) == 0 for d in agent.devices):
        raise VoterError(f"voter {agent.voter_id}: some device holds no data")
    spec = agent.spec
    if spec.kind is Kind.PERM:
        return _trace_permutation(agent, [d[0] for d in agent.devices])
    if candidate_index is None or not 1 <= candidate_index <= len(agent.devices[0]):
        raise VoterError(f"candidate {candidate_index!r} out of range")
    column = [d[candidate_index - 1].value for d in agent.devices]
    out = []
    for pos in range(spec.param):
        total = 0
        for row in column:
            total += row[pos]
        digit = total % 10 if spec.kind is Kind.DIGITS else total % 2
        if _slip(agent):
            base = 10 if spec.kind is Kind.DIGITS else 2
            digit = (digit + 1 + agent.rng.randbelow(base - 1)) % base
        out.append(digit)
    return GroupElement(spec, out)


def _trace_permutation(agent: VoterAgent, shares: Sequence[GroupElement]) -> GroupElement:
    c = shares[0].spec.param
    images = []
    for x in range(1, c + 1):
        y = x
        for s in reversed(shares):
            y = s.value[y - 1]
        images.append(y)
    for pos in range(c):
        if _slip(agent):
            other = agent.rng.randbelow(c)
            images[pos], images[other] = images[other], images[pos]
    return GroupElement(shares[0].spec, images)


def check_intent(intent: Sequence[int], c: int, seats: int | None):
    """Validate a voter's intent; ``seats`` None means single-seat."""
    intent = list(intent)
    limit = 1 if seats is None else seats
    if len(intent) > limit:
        raise VoterError(f"intent {intent} picks more than {limit} candidate(s)")
    if len(set(intent)) != len(intent):
        raise VoterError(f"intent {intent} repeats a candidate")
    for x in intent:
        if not isinstance(x, int) or not 1 <= x <= c:
            raise VoterError(f"candidate {x!r} outside 1..{c}")


def cast(agent: VoterAgent, reconstruction: GroupElement | None = None) -> list[Ballot]:
    """Ballots leaving the voter: the chosen code, or one image per chosen candidate."""
    if not agent.intent:
        return []
    if agent.multi_seat:
        perm = reconstruction if reconstruction is not None else human_reconstruct(agent)
        c = perm.spec.param
        check_intent(agent.intent, c, len(agent.intent))
        return [Ballot(agent.voter_id, img) for img in sorted(perm.value[i - 1] for i in agent.intent)]
    c = len(agent.devices[0])
    check_intent(agent.intent, c, None)
    choice = agent.intent[0]
    code = reconstruction if reconstruction is not None else human_reconstruct(agent, choice)
    return [Ballot(agent.voter_id, code)]
