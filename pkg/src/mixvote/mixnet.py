"""Share-based MIX protocols over blocks of simulated servers.

Three variants are provided:

* ``P1`` -- didactic transmit-and-reply: b = t+1 disjoint blocks, each server
  used once, shares move position-wise between blocks.
* ``P2`` -- Abelian carriers over any verifier set system.  Between blocks the
  shares are either redistributed (``reshare``) or handed over position-wise
  (``confinement``).  A slot may carry c parallel code strings; they all share
  the slot permutation and the modifier.
* ``P3`` -- permutations (S_c) with multiplicative sharing.  Modifiers are
  composed on via a group-product subprotocol between consecutive blocks.

Forward direction, per Abelian block k: the leader (position 1) draws a slot
permutation rho_k and announces it; all members reindex ``new[i] = old[rho_k(i)]``;
the leader draws modifier shares and every member adds its column.  The reply
path runs through the leaders only and undoes each block in reverse: strip the
modifier at the current slot, then map the slot through rho_k.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from typing import Sequence

from .groups import GroupElement, GroupSpec, Kind, identity, inverse, op, perms, product, sample_uniform
from .rng import RandomSource
from .setsystem import (
    SetSystem,
    TransferMode,
    VerificationIntractable,
    check_confinement,
    verify_verifiers,
)
from .sharing import Scheme, ShareBundle, SharingError
from .transcript import Split, Transcript, device, server, voter


class Protocol(str, enum.Enum):
    P1 = "p1"
    P2 = "p2"
    P3 = "p3"


class Engine(str, enum.Enum):
    IDEAL = "ideal"
    CONCRETE = "concrete"


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class ReplyError(ValueError):
    pass


FUNCTIONALITY = "F:product"


@dataclass(frozen=True)
class MixConfig:
    setsystem: SetSystem
    carrier: GroupSpec
    protocol: Protocol = Protocol.P2
    transfer_mode: TransferMode = TransferMode.RESHARE
    bundle_width: int = 1
    engine: Engine = Engine.IDEAL
    dealer: str = "cge"

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        object.__setattr__(self, "transfer_mode", TransferMode(self.transfer_mode))
        object.__setattr__(self, "engine", Engine(self.engine))

    @property
    def t(self) -> int:
        return self.setsystem.t

    @property
    def reshares(self) -> bool:
        return self.protocol is Protocol.P2 and self.transfer_mode is TransferMode.RESHARE

    def validate(self) -> "MixConfig":
        _validate(self)
        return self


@functools.lru_cache(maxsize=256)
def _validate(cfg: MixConfig):
    s = cfg.setsystem
    if not s.blocks:
        raise ConfigError("setsystem", "needs at least one block")
    if cfg.bundle_width < 1:
        raise ConfigError("bundle_width", "must be at least 1")
    if cfg.protocol is Protocol.P3:
        if cfg.carrier.kind is not Kind.PERM:
            raise ConfigError("carrier", "the non-Abelian protocol needs a permutation carrier")
        if cfg.bundle_width != 1:
            raise ConfigError("bundle_width", "the non-Abelian protocol moves one permutation per slot")
        for k in range(len(s.blocks) - 1):
            if s.blocks[k] == s.blocks[k + 1]:
                raise ConfigError("setsystem", f"consecutive blocks {k + 1} and {k + 2} must differ")
    else:
        if not cfg.carrier.abelian:
            raise ConfigError("carrier", f"protocol {cfg.protocol.value} needs an Abelian carrier")
    if cfg.protocol is Protocol.P1:
        if cfg.bundle_width != 1:
            raise ConfigError("bundle_width", "the didactic protocol moves one pad per slot")
        if len(s.blocks) != s.t + 1 or not s.is_disjoint():
            raise ConfigError("setsystem", "the didactic protocol needs t+1 disjoint blocks (each server used once)")
    try:
        report = verify_verifiers(s)
    except VerificationIntractable as exc:
        raise ConfigError("setsystem", str(exc)) from None
    if not report:
        raise ConfigError("setsystem", f"not a verifier set system ({report.condition}): {report.detail}")
    if cfg.protocol is Protocol.P2 and cfg.transfer_mode is TransferMode.CONFINEMENT:
        conf = check_confinement(s)
        if not conf:
            raise ConfigError("transfer_mode", f"confinement mode requires t-confinement: {conf.detail}")
    return True


@dataclass(frozen=True)
class BlockSecrets:
    level: int
    rho: GroupElement | None
    omega: tuple  # v rows, each a tuple of t+1 modifier shares

    def modifier(self, slot: int) -> GroupElement:
        return product(self.omega[slot - 1])


@dataclass(frozen=True)
class MixSecrets:
    protocol: Protocol
    v: int
    blocks: tuple

    def block(self, k: int) -> BlockSecrets:
        return self.blocks[k - 1]

    def lineage(self, final_slot: int) -> list[int]:
        """Slot of the message at every level, from the dealer's slot to ``final_slot``."""
        s = final_slot
        path = [s]
        for blk in reversed(self.blocks):
            if blk.rho is not None:
                s = blk.rho(s)
                path.append(s)
        return path[::-1]

    def origin(self, final_slot: int) -> int:
        return self.lineage(final_slot)[0]

    def net_modifier(self, final_slot: int) -> GroupElement:
        """Total blinding applied to the message that ends at ``final_slot``."""
        if self.protocol is Protocol.P3:
            s = final_slot
            acc = self.blocks[0].modifier(s)
            for blk in reversed(self.blocks[1:]):
                s = blk.rho(s)
                acc = op(acc, blk.modifier(s))
            return acc
        s = final_slot
        acc = None
        for blk in reversed(self.blocks):
            w = blk.modifier(s)
            acc = w if acc is None else op(acc, w)
            s = blk.rho(s)
        return acc


@dataclass(frozen=True)
class ShareMatrix:
    level: int
    holder: tuple
    entries: tuple  # v rows x c codes x (t+1) shares


@dataclass
class ForwardResult:
    secrets: MixSecrets
    delivered: list  # per final slot: list of c ShareBundles (Abelian) or one ShareBundle (P3)
    transcript: Transcript
    final: ShareMatrix | None = None

    def __iter__(self):
        return iter((self.secrets, self.delivered, self.transcript))


def _raw_share(secret: GroupElement, t: int, rng) -> tuple:
    spec = secret.spec
    drawn = [sample_uniform(spec, rng) for _ in range(t)]
    if not drawn:
        return (secret,)
    return tuple(drawn) + (op(inverse(product(drawn)), secret),)


def _add_all(elems):
    acc = elems[0]
    for e in elems[1:]:
        acc = op(acc, e)
    return acc


def _forward_abelian(rows, cfg: MixConfig, rng, tr: Transcript) -> ForwardResult:
    s = cfg.setsystem
    t = s.t
    n = t + 1
    v = len(rows)
    spec = cfg.carrier
    slot_perm = perms(v)
    blocks = [tuple(server(x) for x in blk) for blk in s.blocks]
    b = len(blocks)

    # held[i][code] = tuple of n shares, i = 0-based slot
    held = []
    for i, row in enumerate(rows, start=1):
        if len(row) != cfg.bundle_width:
            raise ConfigError("bundle_width", f"slot {i} carries {len(row)} codes, expected {cfg.bundle_width}")
        for x in row:
            if x.spec != spec:
                raise ConfigError("carrier", f"payload {x!r} is not in {spec}")
        shs = [_raw_share(x, t, rng) for x in row]
        held.append(shs)
        for j in range(n):
            tr.emit(cfg.dealer, blocks[0][j], "share", i, 1, tuple(sh[j] for sh in shs))

    secrets = []
    for k in range(1, b + 1):
        members = blocks[k - 1]
        leader = members[0]
        rho = sample_uniform(slot_perm, rng)
        tr.emit(leader, members, "perm_announce", None, k, rho)
        rv = rho.value
        held = [held[rv[i] - 1] for i in range(v)]
        omega = tuple(tuple(sample_uniform(spec, rng) for _ in range(n)) for _ in range(v))
        tr.emit(leader, members, "modifier", None, k,
                Split(tuple(tuple(omega[i][j] for i in range(v)) for j in range(n))))
        held = [[tuple(op(omega[i][j], sh[j]) for j in range(n)) for sh in held[i]] for i in range(v)]
        secrets.append(BlockSecrets(k, rho, omega))

        last = k == b
        if cfg.reshares:
            target = blocks[k] if not last else members
            held = _reshare_level(held, members, target, k, t, rng, tr)
        elif not last:
            target = blocks[k]
            for i in range(v):
                for j in range(n):
                    tr.emit(members[j], target[j], "share", i + 1, k + 1, tuple(sh[j] for sh in held[i]))

    final_members = blocks[-1]
    delivered = []
    for i in range(v):
        for j in range(n):
            tr.emit(final_members[j], device(i + 1, j + 1), "delivery", i + 1, b,
                    tuple(sh[j] for sh in held[i]))
        delivered.append([ShareBundle(spec, sh, Scheme.ADDITIVE) for sh in held[i]])
    final = ShareMatrix(b, tuple(final_members), tuple(tuple(tuple(sh) for sh in r) for r in held))
    return ForwardResult(MixSecrets(cfg.protocol, v, tuple(secrets)), delivered, tr, final)


def _reshare_level(held, senders, receivers, k, t, rng, tr):
    n = t + 1
    v = len(held)
    out = []
    for i in range(v):
        # sub[code][j] = subshares of old share j
        sub = [[_raw_share(sh[j], t, rng) for j in range(n)] for sh in held[i]]
        for j in range(n):
            for q in range(n):
                tr.emit(senders[j], receivers[q], "reshare", i + 1, k, tuple(sc[j][q] for sc in sub))
        out.append([tuple(_add_all([sc[j][q] for j in range(n)]) for q in range(n)) for sc in sub])
    return out


def forward_p1(pads: Sequence[GroupElement], config: MixConfig, rng: RandomSource,
               transcript: Transcript | None = None) -> ForwardResult:
    """Didactic forward pass.  ``delivered[i]`` is the ShareBundle for final slot i+1."""
    if config.protocol is not Protocol.P1:
        raise ConfigError("protocol", "forward_p1 needs protocol p1")
    config.validate()
    tr = transcript if transcript is not None else Transcript()
    res = _forward_abelian([[p] for p in pads], config, rng, tr)
    res.delivered = [d[0] for d in res.delivered]
    return res


def forward_p2(codes: Sequence[Sequence[GroupElement]], config: MixConfig, rng: RandomSource,
               transcript: Transcript | None = None) -> ForwardResult:
    """Bundled Abelian forward pass.  ``codes`` is v rows of c code strings."""
    if config.protocol is not Protocol.P2:
        raise ConfigError("protocol", "forward_p2 needs protocol p2")
    config.validate()
    tr = transcript if transcript is not None else Transcript()
    return _forward_abelian([list(r) for r in codes], config, rng, tr)


def _strip_path(items, secrets: MixSecrets, cfg: MixConfig, tr: Transcript, first_hop: str | None):
    """Leader-to-leader reverse path for the Abelian protocols.

    ``items`` are (final slot, value) pairs.  Returns (original slot, value).
    """
    s = cfg.setsystem
    v = secrets.v
    b = len(s.blocks)
    cur = []
    for slot, val in items:
        if not isinstance(slot, int) or not 1 <= slot <= v:
            raise ReplyError(f"reply at unknown slot {slot!r}")
        cur.append((slot, val))
    if first_hop is not None:
        leader_b = server(s.leader(b))
        for slot, val in sorted(cur, key=_order_key):
            tr.emit(voter(slot) if first_hop == "voter" else first_hop, leader_b, "reply", slot, b, val)
    for k in range(b, 0, -1):
        blk = secrets.block(k)
        rv = blk.rho.value
        nxt = []
        for slot, val in cur:
            w = blk.modifier(slot)
            nxt.append((rv[slot - 1], op(inverse(w), val)))
        nxt.sort(key=_order_key)
        src = server(s.leader(k))
        dst = server(s.leader(k - 1)) if k > 1 else cfg.dealer
        for slot, val in nxt:
            tr.emit(src, dst, "reply", slot, k - 1, val)
        cur = nxt
    return cur


def _order_key(item):
    slot, val = item
    if isinstance(val, GroupElement):
        return slot, val.value
    return slot, val


def reply_p1(replies: Sequence[GroupElement], secrets: MixSecrets, config: MixConfig,
             transcript: Transcript | None = None) -> list[GroupElement]:
    """Reverse pass for the didactic protocol.

    ``replies[i]`` is sent by the sender at final slot i+1.  Returns the values
    arriving at the receiver, indexed by original slot.
    """
    tr = transcript if transcript is not None else Transcript()
    if len(replies) != secrets.v:
        raise ReplyError(f"expected {secrets.v} replies, got {len(replies)}")
    out = _strip_path(list(enumerate(replies, start=1)), secrets, config, tr, "voter")
    result = [None] * secrets.v
    for slot, val in out:
        result[slot - 1] = val
    return result


def reply_p2(cast_codes, secrets: MixSecrets, config: MixConfig,
             transcript: Transcript | None = None) -> list[tuple[int, GroupElement]]:
    """Reverse pass for cast codes.  Returns (original slot, code) pairs."""
    tr = transcript if transcript is not None else Transcript()
    return _strip_path(list(cast_codes), secrets, config, tr, "voter")


# non-Abelian protocol

def _product_raw(p, w, P, Q, engine: Engine, rng, tr: Transcript, slot, level):
    spec = p[0].spec
    n = len(w)
    t = n - 1
    if engine is Engine.IDEAL:
        secret = op(product(w), product(p))
        y = _raw_share(secret, t, rng)
        for j in range(n):
            tr.emit(FUNCTIONALITY, Q[j], "mpc", slot, level, y[j])
        return y

    gs = [sample_uniform(spec, rng) for _ in range(t)]
    chain = [(Q[j], inverse(gs[j])) for j in range(t - 1, -1, -1)]
    chain += [(Q[j], w[j]) for j in range(n)]
    chain += [(P[j], p[j]) for j in range(n)]
    merged = []
    for h, x in chain:
        if merged and merged[-1][0] == h:
            merged[-1] = (h, op(merged[-1][1], x))
        else:
            merged.append((h, x))
    L = len(merged)
    combiner = merged[0][0]
    # boundary e sits between merged[e] and merged[e+1]; the combiner's own
    # boundary needs no mask because the combiner sees both sides anyway
    masks = [None]
    for e in range(1, L - 1):
        r = sample_uniform(spec, rng)
        masks.append(r)
        tr.emit(merged[e][0], merged[e + 1][0], "mpc", slot, level, r)
    r_end = sample_uniform(spec, rng)
    tr.emit(Q[-1], merged[-1][0], "mpc", slot, level, r_end)
    acc = None
    for e, (h, x) in enumerate(merged):
        m = x if e <= 1 else op(inverse(masks[e - 1]), x)
        if e == 0:
            acc = m if L > 1 else op(m, r_end)
            continue
        m = op(m, masks[e] if e < L - 1 else r_end)
        if h != combiner:
            tr.emit(h, combiner, "mpc", slot, level, m)
        acc = op(acc, m)
    tr.emit(combiner, Q[-1], "mpc", slot, level, acc)
    y = tuple(gs) + (op(acc, inverse(r_end)),)
    # output shares are local state; log them so a corrupted holder's view is complete
    for j in range(n):
        tr.emit(Q[j], Q[j], "mpc", slot, level, y[j])
    return y


def participants(s: SetSystem, sender_block: int, receiver_block: int) -> tuple:
    """Servers running the product between two blocks: their union, topped up
    with the lowest-numbered other servers until there are at least 2t+1."""
    pool = list(dict.fromkeys(s.blocks[sender_block - 1] + s.blocks[receiver_block - 1]))
    need = 2 * s.t + 1
    for x in range(1, s.m + 1):
        if len(pool) >= need:
            break
        if x not in pool:
            pool.append(x)
    return tuple(sorted(pool))


def group_product(pi_shares: ShareBundle, omega_shares: ShareBundle, engine: Engine | str = Engine.IDEAL,
                  rng: RandomSource | None = None, *, pi_holders=None, omega_holders=None,
                  transcript: Transcript | None = None, slot=None, level=None) -> ShareBundle:
    """Shares of ``omega . pi`` held by the omega holders."""
    engine = Engine(engine)
    if pi_shares.spec != omega_shares.spec:
        raise SharingError(f"cannot multiply {pi_shares.spec} by {omega_shares.spec}")
    if pi_shares.scheme is not Scheme.MULTIPLICATIVE or omega_shares.scheme is not Scheme.MULTIPLICATIVE:
        raise SharingError("group_product takes multiplicative sharings")
    if len(pi_shares) != len(omega_shares):
        raise SharingError("both sharings need the same number of shares")
    if rng is None:
        raise ValueError("group_product needs a random source")
    n = len(pi_shares)
    P = list(pi_holders) if pi_holders is not None else [f"P{j}" for j in range(1, n + 1)]
    Q = list(omega_holders) if omega_holders is not None else [f"Q{j}" for j in range(1, n + 1)]
    tr = transcript if transcript is not None else Transcript()
    y = _product_raw(pi_shares.shares, omega_shares.shares, P, Q, engine, rng, tr, slot, level)
    return ShareBundle(pi_shares.spec, y, Scheme.MULTIPLICATIVE)


def forward_p3(perm_list: Sequence[GroupElement], config: MixConfig, rng: RandomSource,
               transcript: Transcript | None = None) -> ForwardResult:
    """Non-Abelian forward pass.

    Block 1 receives the dealt shares.  For k = 2..b the leader of B_k draws
    modifier shares, the group product moves ``omega^k . pi`` into B_k, and B_k
    reindexes slots by rho_k.  Finally B_1's leader draws omega^1 and the
    product B_b -> B_1 yields the shares that B_1 delivers.
    """
    if config.protocol is not Protocol.P3:
        raise ConfigError("protocol", "forward_p3 needs protocol p3")
    config.validate()
    tr = transcript if transcript is not None else Transcript()
    s = config.setsystem
    t = s.t
    n = t + 1
    v = len(perm_list)
    spec = config.carrier
    slot_perm = perms(v)
    blocks = [tuple(server(x) for x in blk) for blk in s.blocks]
    b = len(blocks)
    for x in perm_list:
        if x.spec != spec:
            raise ConfigError("carrier", f"payload {x!r} is not in {spec}")

    held = []
    for i, x in enumerate(perm_list, start=1):
        sh = _raw_share(x, t, rng)
        held.append(sh)
        for j in range(n):
            tr.emit(config.dealer, blocks[0][j], "share", i, 1, sh[j])

    def blind(k_from, k_to, level):
        nonlocal held
        members = blocks[k_to - 1]
        omega = tuple(tuple(sample_uniform(spec, rng) for _ in range(n)) for _ in range(v))
        tr.emit(members[0], members, "modifier", None, level,
                Split(tuple(tuple(omega[i][j] for i in range(v)) for j in range(n))))
        parts = participants(s, k_from, k_to)
        tr.emit(members[0], tuple(server(x) for x in parts), "mpc", None, level,
                ("participants",) + tuple(parts))
        held = [
            _product_raw(held[i], omega[i], blocks[k_from - 1], members, config.engine, rng, tr, i + 1, level)
            for i in range(v)
        ]
        return omega

    secrets = [None] * b
    for k in range(2, b + 1):
        omega = blind(k - 1, k, k)
        members = blocks[k - 1]
        rho = sample_uniform(slot_perm, rng)
        tr.emit(members[0], members, "perm_announce", None, k, rho)
        held = [held[rho.value[i] - 1] for i in range(v)]
        secrets[k - 1] = BlockSecrets(k, rho, omega)
    omega1 = blind(b, 1, 1)
    secrets[0] = BlockSecrets(1, None, omega1)

    delivered = []
    for i in range(v):
        for j in range(n):
            tr.emit(blocks[0][j], device(i + 1, j + 1), "delivery", i + 1, 1, held[i][j])
        delivered.append(ShareBundle(spec, held[i], Scheme.MULTIPLICATIVE))
    final = ShareMatrix(1, blocks[0], tuple(tuple(h) for h in held))
    return ForwardResult(MixSecrets(Protocol.P3, v, tuple(secrets)), delivered, tr, final)


def reply_p3(cast_images, secrets: MixSecrets, config: MixConfig,
             transcript: Transcript | None = None) -> list[tuple[int, int]]:
    """Reverse pass for cast candidate images.

    ``cast_images`` are (final slot, image) pairs, image in 1..c.  B_1's leader
    strips omega^1, then leaders of B_b .. B_2 strip their modifier and undo
    rho_k.  Returns (original slot, image under the original permutation).
    """
    tr = transcript if transcript is not None else Transcript()
    s = config.setsystem
    c = config.carrier.param
    v = secrets.v
    b = len(s.blocks)
    cur = []
    for slot, img in cast_images:
        if not isinstance(slot, int) or not 1 <= slot <= v:
            raise ReplyError(f"reply at unknown slot {slot!r}")
        if not isinstance(img, int) or not 1 <= img <= c:
            raise ReplyError(f"image {img!r} outside 1..{c}")
        cur.append((slot, img))
    cur.sort()
    lead1 = server(s.leader(1))
    for slot, img in cur:
        tr.emit(voter(slot), lead1, "reply", slot, 1, img)

    w1 = secrets.block(1)
    cur = sorted((slot, inverse(w1.modifier(slot))(img)) for slot, img in cur)
    src = lead1
    for k in range(b, 1, -1):
        dst = server(s.leader(k))
        for slot, img in cur:
            tr.emit(src, dst, "reply", slot, k, img)
        blk = secrets.block(k)
        nxt = []
        for slot, img in cur:
            before = blk.rho(slot)
            nxt.append((before, inverse(blk.modifier(before))(img)))
        cur = sorted(nxt)
        src = dst
    for slot, img in cur:
        tr.emit(src, config.dealer, "reply", slot, 0, img)
    return cur


def identity_secrets(cfg: MixConfig, v: int) -> MixSecrets:
    """All-identity mixing secrets (passthrough); handy for tests."""
    spec = cfg.carrier
    n = cfg.t + 1
    e = identity(spec)
    ident = identity(perms(v))
    blocks = []
    for k in range(1, len(cfg.setsystem.blocks) + 1):
        rho = None if (cfg.protocol is Protocol.P3 and k == 1) else ident
        blocks.append(BlockSecrets(k, rho, tuple(tuple(e for _ in range(n)) for _ in range(v))))
    return MixSecrets(cfg.protocol, v, tuple(blocks))
