"""Block systems of MIX servers.

A :class:`SetSystem` is an ordered list of blocks over servers ``1..m``.  Each
block is an ordered tuple; the position of a server inside it is the index of
the share that server handles.  The helpers here build such systems, check the
verifier property (every set of at most t servers misses some block), check
t-confinement, and build the layered share-flow DAG whose t-color cuts decide
whether a coalition can sever the flow.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx

from .rng import RandomSource

MAX_VERIFY_M = 25
MAX_VERIFY_T = 4


class TransferMode(str, enum.Enum):
    RESHARE = "reshare"
    CONFINEMENT = "confinement"


class InfeasibleError(ValueError):
    """No block system with the requested parameters exists (or greedy search ran dry)."""


class VerificationIntractable(ValueError):
    """Exhaustive verification refused because the instance is above the size caps."""


@dataclass(frozen=True)
class SetSystem:
    m: int
    t: int
    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(tuple(int(x) for x in b) for b in self.blocks))
        if self.m < 1 or self.t < 0:
            raise ValueError(f"need m >= 1 and t >= 0, got m={self.m}, t={self.t}")

    @property
    def b(self) -> int:
        return len(self.blocks)

    @property
    def servers(self) -> tuple:
        return tuple(range(1, self.m + 1))

    def used_servers(self) -> set:
        return {x for blk in self.blocks for x in blk}

    def leader(self, k: int) -> int:
        """Leader of block k (1-based): the server at position 1."""
        return self.blocks[k - 1][0]

    def is_disjoint(self) -> bool:
        flat = [x for blk in self.blocks for x in blk]
        return len(flat) == len(set(flat))

    def to_json(self) -> dict:
        return {"m": self.m, "t": self.t, "blocks": [list(b) for b in self.blocks]}

    @classmethod
    def from_json(cls, obj: dict) -> "SetSystem":
        return cls(int(obj["m"]), int(obj["t"]), obj["blocks"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    condition: str | None = None
    witness: frozenset | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def build_disjoint(t: int) -> SetSystem:
    if t < 0:
        raise ValueError("t must be non-negative")
    n = t + 1
    blocks = [tuple(range(k * n + 1, (k + 1) * n + 1)) for k in range(n)]
    return SetSystem(n * n, t, blocks)


def _check_caps(m: int, t: int):
    if m > MAX_VERIFY_M or t > MAX_VERIFY_T:
        raise VerificationIntractable(
            f"exhaustive verification is capped at m <= {MAX_VERIFY_M}, t <= {MAX_VERIFY_T} (got m={m}, t={t})"
        )


def build_greedy(m: int, t: int, rng: RandomSource | None = None) -> SetSystem:
    """Greedy verifier system: keep adding the (t+1)-block that frees the most
    still-uncovered t-sets.  Ties go to the lexicographically smallest block.

    With ``rng`` the server labels are shuffled afterwards, which keeps the
    structure but varies which ids end up where.
    """
    if t < 0 or m < t + 1:
        raise InfeasibleError(f"need m >= t+1 servers (m={m}, t={t})")
    _check_caps(m, t)
    universe = range(1, m + 1)
    candidates = [frozenset(c) for c in itertools.combinations(universe, t + 1)]
    cand_sorted = [tuple(sorted(c)) for c in candidates]
    uncovered = {frozenset(f) for f in itertools.combinations(universe, t)}
    blocks: list[tuple] = []
    while uncovered:
        best, best_gain = None, 0
        for c, key in zip(candidates, cand_sorted):
            gain = sum(1 for f in uncovered if not (f & c))
            if gain > best_gain:
                best, best_gain = key, gain
        if best is None:
            raise InfeasibleError(
                f"no block system exists for m={m}, t={t}: some {t}-set meets every possible block"
            )
        blocks.append(best)
        bs = frozenset(best)
        uncovered = {f for f in uncovered if f & bs}
    if rng is not None:
        labels = list(universe)
        for i in range(len(labels) - 1, 0, -1):
            j = rng.randbelow(i + 1)
            labels[i], labels[j] = labels[j], labels[i]
        blocks = [tuple(labels[x - 1] for x in blk) for blk in blocks]
    return SetSystem(m, t, blocks)


def verify_verifiers(s: SetSystem) -> VerifyReport:
    """Exhaustively check the three verifier-system conditions.

    Failures carry the violated condition and, for the covering condition, the
    first offending server set F (ordered by size, then lexicographically).
    """
    m, t = s.m, s.t
    _check_caps(m, t)
    for k, blk in enumerate(s.blocks, start=1):
        bad = [x for x in blk if not 1 <= x <= m]
        if bad:
            return VerifyReport(False, "universe", None, f"block {k} uses ids {bad} outside 1..{m}")
    for k, blk in enumerate(s.blocks, start=1):
        if len(blk) != t + 1 or len(set(blk)) != len(blk):
            return VerifyReport(False, "block-size", None, f"block {k} = {blk} is not {t + 1} distinct servers")
    block_sets = [frozenset(b) for b in s.blocks]
    for size in range(t + 1):
        for f in itertools.combinations(range(1, m + 1), size):
            fs = frozenset(f)
            if all(fs & b for b in block_sets):
                return VerifyReport(False, "free-block", fs, f"F={sorted(fs)} meets every block")
    return VerifyReport(True)


def slots_of(s: SetSystem) -> dict:
    """server id -> set of (block, position) slots it occupies (both 1-based)."""
    occ: dict = {}
    for k, blk in enumerate(s.blocks, start=1):
        for p, x in enumerate(blk, start=1):
            occ.setdefault(x, set()).add((k, p))
    return occ


def check_confinement(s: SetSystem) -> VerifyReport:
    """Every t servers together occupy at most t (block, position) slots."""
    t = s.t
    if t == 0:
        return VerifyReport(True)
    _check_caps(s.m, t)
    occ = slots_of(s)
    for T in itertools.combinations(range(1, s.m + 1), t):
        taken = set()
        for x in T:
            taken |= occ.get(x, set())
        if len(taken) > t:
            return VerifyReport(False, "t-confinement", frozenset(T),
                                f"servers {list(T)} occupy {len(taken)} slots > t={t}")
    return VerifyReport(True)


RECEIVER = "receiver"
SENDER = "sender"


@dataclass
class VirtualDag:
    graph: nx.DiGraph
    mode: TransferMode
    levels: list = field(default_factory=list)

    @property
    def colors(self) -> list:
        return sorted({c for _, c in self.graph.nodes(data="color") if c is not None})

    def edge_count(self) -> int:
        return self.graph.number_of_edges()

    def middle_vertices(self) -> int:
        return self.graph.number_of_nodes() - 2


def build_dag(s: SetSystem, mode: TransferMode | str = TransferMode.RESHARE) -> VirtualDag:
    """Layered DAG receiver -> B_1 -> ... -> B_b -> sender.

    Vertices inside blocks are ``(k, position)`` and carry the server id as color.
    Between consecutive blocks the edges are complete bipartite under resharing
    and position-to-position under confinement.
    """
    mode = TransferMode(mode)
    g = nx.DiGraph()
    g.add_node(RECEIVER, level=0, color=None)
    levels = [[RECEIVER]]
    for k, blk in enumerate(s.blocks, start=1):
        layer = []
        for p, x in enumerate(blk, start=1):
            g.add_node((k, p), level=k, color=x)
            layer.append((k, p))
        levels.append(layer)
    g.add_node(SENDER, level=len(s.blocks) + 1, color=None)
    levels.append([SENDER])
    if s.blocks:
        for v in levels[1]:
            g.add_edge(RECEIVER, v)
        for v in levels[-2]:
            g.add_edge(v, SENDER)
    else:
        g.add_edge(RECEIVER, SENDER)
    for k in range(1, len(s.blocks)):
        prev, nxt = levels[k], levels[k + 1]
        if mode is TransferMode.RESHARE:
            g.add_edges_from((a, b) for a in prev for b in nxt)
        else:
            for a in prev:
                b = (k + 1, a[1])
                if g.has_node(b):
                    g.add_edge(a, b)
    return VirtualDag(g, mode, levels)


def check_t_cut(d: VirtualDag, t: int) -> VerifyReport:
    """Removing the vertices of any t colors must leave a receiver -> sender path."""
    colors = d.colors
    k = min(t, len(colors))
    for removed in itertools.combinations(colors, k):
        gone = set(removed)
        keep = [n for n, c in d.graph.nodes(data="color") if c not in gone]
        sub = d.graph.subgraph(keep)
        if not nx.has_path(sub, RECEIVER, SENDER):
            return VerifyReport(False, "t-cut", frozenset(removed),
                                f"removing colors {list(removed)} disconnects receiver from sender")
    return VerifyReport(True)


def existential_honesty(s: SetSystem, corrupted: Iterable[int]) -> int | None:
    """Index of the first block with no corrupted member, or None."""
    bad = set(corrupted)
    for k, blk in enumerate(s.blocks, start=1):
        if not bad & set(blk):
            return k
    return None


def random_system(m: int, t: int, b: int, rng: RandomSource, exact_size: bool = True) -> SetSystem:
    """Random block list (not necessarily a verifier system); for testing."""
    blocks = []
    for _ in range(b):
        size = t + 1 if exact_size else 1 + rng.randbelow(min(m, t + 2))
        pool = list(range(1, m + 1))
        blk = []
        for _ in range(min(size, m)):
            blk.append(pool.pop(rng.randbelow(len(pool))))
        blocks.append(tuple(blk))
    return SetSystem(m, t, blocks)

