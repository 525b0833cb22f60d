"""Exact privacy and anonymity audits.

An :class:`Experiment` is a protocol run written as a deterministic function of
a random source, a discrete hypothesis ``h`` and a secret vector ``s``.  For a
corruption set C the auditor computes, for every hypothesis, the exact
distribution of C's view over *all* randomness, and reports the largest total
variation distance between any two hypotheses.  Distance exactly 0 is PASS.

Two exact methods are available.

``brute``
    Enumerates every draw sequence (:func:`walk_tree`).  Works for any
    carrier, but the state count is |G|^(number of draws).

``affine``
    For Abelian carriers.  Once the discrete draws (slot permutations) are
    fixed, every value in the transcript is an affine function over Z_q of the
    scalar draws and of the secret.  Per discrete branch the view is therefore
    uniform on a coset ``c + B s + H`` of the subgroup H spanned by the scalar
    directions.  The auditor recovers c, B and the generators of H by probing
    (base run, one run per unit direction), spot-checks affinity, and compares
    the resulting coset mixtures exactly.  Z_10 is handled as Z_2 x Z_5.
"""

from __future__ import annotations

import itertools
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from ..groups import GroupElement, GroupSpec, Kind, all_elements, op, perms, sample_uniform
from ..mixnet import (
    Engine,
    MixConfig,
    Protocol,
    _product_raw,
    _raw_share,
    forward_p1,
    forward_p2,
    forward_p3,
    reply_p1,
    reply_p2,
    reply_p3,
)
from ..setsystem import SetSystem, TransferMode, existential_honesty
from ..sharing import reconstruct
from ..transcript import Split, Transcript, device, server
from ..voter import VoterAgent, cast, human_reconstruct, receive_shares
from . import gfp
from .enumerate import (
    Intractable,
    ProbeSource,
    TreeSource,
    check_rng,
    from_vector,
    tree_size,
    unit,
    walk_discrete,
    walk_tree,
    zeros,
)
from .views import CorruptionSet, all_subsets, capture, flatten, party_universe

DEFAULT_BUDGET = 10**7

PASS = "PASS"
FAIL = "FAIL"
INTRACTABLE = "INTRACTABLE"


class NotAffine(RuntimeError):
    """A probed run did not behave affinely; the affine method cannot be used."""


@dataclass
class Experiment:
    name: str
    prop: str
    run: Callable  # (source, h, s) -> Transcript
    hypotheses: list
    secret_dim: int = 0
    linear_spec: GroupSpec | None = None
    universe: list = field(default_factory=list)
    observer: str | None = None
    side: Callable | None = None  # h -> extra observer knowledge (e.g. the codebook)
    setsystem: SetSystem | None = None
    t: int = 0
    note: str | None = None
    secret_domain: list | None = None  # restricts s for exact fallback / brute force

    @property
    def modulus(self) -> int:
        return self.linear_spec.modulus if self.linear_spec is not None else 0

    def secrets(self) -> list:
        if self.secret_dim == 0:
            return [()]
        if self.secret_domain is not None:
            return [tuple(s) for s in self.secret_domain]
        return list(itertools.product(range(self.modulus), repeat=self.secret_dim))

    def labels(self) -> list:
        return [(h, s) for h in self.hypotheses for s in self.secrets()]

    def side_info(self, corruption: CorruptionSet, h):
        if self.side is None or corruption.observer is None:
            return ()
        return self.side(h)


@dataclass
class CaseResult:
    experiment: str
    prop: str
    corruption: CorruptionSet
    distance: Fraction | None
    verdict: str
    expected: str
    states: int
    method: str
    wall_time: float | None = None
    note: str | None = None

    @property
    def ok(self) -> bool:
        return self.verdict == self.expected

    def to_json(self, timing: bool = False) -> dict:
        return {
            "scenario": self.experiment,
            "property": self.prop,
            "corruption_set": self.corruption.label(),
            "distance": None if self.distance is None else str(self.distance),
            "verdict": self.verdict,
            "expected": self.expected,
            "states_enumerated": self.states,
            "method": self.method,
            "wall_time": round(self.wall_time, 6) if (timing and self.wall_time is not None) else None,
            "note": self.note,
        }


def tv_distance(p: dict, q: dict) -> Fraction:
    keys = set(p) | set(q)
    zero = Fraction(0)
    return sum((abs(p.get(k, zero) - q.get(k, zero)) for k in keys), zero) / 2


def max_pairwise(dists: Sequence[dict], budget: int | None = None) -> Fraction:
    """Largest TV distance between any two of ``dists``.  Identical
    distributions are merged first; ``budget`` caps the pointwise work."""
    uniq = list({frozenset(d.items()): d for d in dists}.values())
    if budget is not None:
        sizes = sum(len(d) for d in uniq)
        if sizes * max(0, len(uniq) - 1) > budget:
            raise Intractable(f"{len(uniq)} distinct view distributions are too many to compare pairwise")
    best = Fraction(0)
    for a, b in itertools.combinations(uniq, 2):
        best = max(best, tv_distance(a, b))
        if best == 1:
            break
    return best


def _view_key(tr: Transcript, parties: frozenset, side):
    return _view_keys(tr, [parties], [side], {})[0]


def _routing(ev, parties: frozenset):
    """How a coalition sees events between ``ev.src`` and ``ev.dst``: True for the
    whole payload, a tuple of component indices for a split payload, None for nothing."""
    if ev.src in parties:
        return True
    dst = ev.dst
    if isinstance(dst, tuple):
        hit = tuple(i for i, d in enumerate(dst) if d in parties)
        if not hit:
            return None
        return hit if isinstance(ev.payload, Split) else True
    return True if dst in parties else None


def _view_keys(tr: Transcript, coalitions, sides, cache: dict) -> list:
    """View keys of several coalitions in one pass; ``cache`` memoizes routing
    per (src, dst, split?) across runs."""
    outs = [[] for _ in coalitions]
    for ev in tr.events:
        ck = (ev.src, ev.dst, isinstance(ev.payload, Split))
        route = cache.get(ck)
        if route is None:
            route = []
            for k, parties in enumerate(coalitions):
                r = _routing(ev, parties)
                if r is not None:
                    route.append((k, r))
            cache[ck] = route
        for k, r in route:
            if r is True:
                outs[k].append((ev.step, ev.payload))
            else:
                outs[k].append((ev.step, tuple((i, ev.payload[i]) for i in r)))
    return [(side, tuple(out)) for side, out in zip(sides, outs)]


# brute force

def brute_force(exp: Experiment, sets: Sequence[CorruptionSet], budget: int = DEFAULT_BUDGET,
                reverse: bool = False):
    """Exact view distributions by full enumeration.  Returns {set: (distance, states)}."""
    labels = exp.labels()
    h0, s0 = labels[0]
    size = tree_size(lambda src: exp.run(src, h0, s0), reverse) * len(labels)
    if size > budget:
        raise Intractable(f"{size} randomness states exceed the budget of {budget}")
    per_set = [[defaultdict(Counter) for _ in labels] for _ in sets]
    coalitions = [c.all_parties for c in sets]
    cache: dict = {}
    states = 0
    for li, (h, s) in enumerate(labels):
        sides = [exp.side_info(c, h) for c in sets]
        for tr, den in walk_tree(lambda src: exp.run(src, h, s), budget, reverse):
            states += 1
            for k, key in enumerate(_view_keys(tr, coalitions, sides, cache)):
                per_set[k][li][key][den] += 1
    out = {}
    for c, accs in zip(sets, per_set):
        dists = []
        for acc in accs:
            dists.append({k: sum((Fraction(n, den) for den, n in cnt.items()), Fraction(0)) for k, cnt in acc.items()})
        out[c] = (max_pairwise(dists, budget), states)
    return out


# affine method

@dataclass
class _Branch:
    prefix: list
    weight: Fraction
    base: dict  # h -> transcript with zero scalars, zero secret
    probes: list  # transcripts with one unit scalar (hypothesis H[0])
    sprobes: list  # transcripts with one unit secret coordinate (hypothesis H[0])
    checks: list  # (h, r, s, transcript)


def _primes(q: int) -> list[int]:
    return {2: [2], 10: [2, 5], 5: [5]}.get(q) or _factor(q)


def _factor(q):
    out, d = [], 2
    while d * d <= q:
        if q % d == 0:
            out.append(d)
            while q % d == 0:
                q //= d
        d += 1
    if q > 1:
        out.append(q)
    return out


def _affine_tables(exp: Experiment, budget: int, reverse: bool):
    if exp.linear_spec is None or not exp.linear_spec.abelian:
        raise NotAffine("the affine method needs an Abelian carrier")
    q = exp.modulus
    S = exp.secret_dim
    H = exp.hypotheses
    zs = [0] * S
    rnd = check_rng()
    branches = []
    runs = 0

    def go(prefix, fn, h, s):
        nonlocal runs
        src = ProbeSource(prefix, fn, reverse)
        tr = exp.run(src, h, s)
        runs += 1
        return src, tr

    for prefix, arities, moduli in walk_discrete(lambda src: exp.run(src, H[0], zs), budget, reverse):
        runs += 1
        if any(m != q for m in moduli):
            raise NotAffine(f"scalar draws with modulus other than {q}")
        N = len(moduli)
        if runs + len(H) * (3 + N + S) > budget:
            raise Intractable(f"probing would exceed the budget of {budget} runs")
        den = 1
        for a in arities:
            den *= a
        base = {}
        for h in H:
            src, tr = go(prefix, zeros, h, zs)
            if src.values != prefix or len(src.moduli) != N:
                raise NotAffine("hypotheses change the shape of the randomness")
            base[h] = tr
        probes = [go(prefix, unit(u), H[0], zs)[1] for u in range(N)]
        sprobes = []
        for k in range(S):
            e = [0] * S
            e[k] = 1
            sprobes.append(go(prefix, zeros, H[0], e)[1])
        checks = []
        for h in H:
            for _ in range(2):
                r = [rnd.randrange(q) for _ in range(N)]
                s = [rnd.randrange(q) for _ in range(S)]
                checks.append((h, r, s, go(prefix, from_vector(r), h, s)[1]))
        branches.append(_Branch(list(prefix), Fraction(1, den), base, probes, sprobes, checks))
    return branches, runs


def _coords(tr, c: CorruptionSet, side, spec):
    return flatten(capture(tr, c, side), spec)


def _affine_case(exp: Experiment, branches, c: CorruptionSet, budget: int):
    q = exp.modulus
    primes = _primes(q)
    spec = exp.linear_spec
    H = exp.hypotheses
    secret_free = True
    keys = {h: Counter() for h in H}
    records = []
    for br in branches:
        side0 = exp.side_info(c, H[0])
        tag0, x0 = _coords(br.base[H[0]], c, side0, spec)
        D = len(x0)
        cols, bcols = [], []
        for tr in br.probes:
            tag, x = _coords(tr, c, side0, spec)
            if tag != tag0:
                raise NotAffine("a scalar probe changed the view structure")
            cols.append([(a - b) % q for a, b in zip(x, x0)])
        for tr in br.sprobes:
            tag, x = _coords(tr, c, side0, spec)
            if tag != tag0:
                raise NotAffine("a secret probe changed the view structure")
            bcols.append([(a - b) % q for a, b in zip(x, x0)])
        base = {}
        for h in H:
            tag_h, x_h = _coords(br.base[h], c, exp.side_info(c, h), spec)
            base[h] = (tag_h, x_h)
        for h, r, s, tr in br.checks:
            tag, x = _coords(tr, c, exp.side_info(c, h), spec)
            tag_h, x_h = base[h]
            if tag != tag_h:
                raise NotAffine("view structure depends on scalar randomness")
            pred = list(x_h)
            for coef, col in zip(r, cols):
                if coef:
                    pred = [(a + coef * b) % q for a, b in zip(pred, col)]
            for coef, col in zip(s, bcols):
                if coef:
                    pred = [(a + coef * b) % q for a, b in zip(pred, col)]
            if pred != [v % q for v in x]:
                raise NotAffine("spot check failed: view is not affine in the draws")
        bases = {}
        for p in primes:
            basis, piv = gfp.rref([[a % p for a in col] for col in cols], p)
            bases[p] = (basis, piv)
            for col in bcols:
                if not gfp.in_span([a % p for a in col], basis, piv, p):
                    secret_free = False
        for h in H:
            tag_h, x_h = base[h]
            key = (tag_h, tuple((p, tuple(map(tuple, bases[p][0])), gfp.reduce([a % p for a in x_h], *bases[p], p))
                                for p in primes))
            keys[h][key] += br.weight
        records.append((br.weight, base, cols, bcols, D))
    if secret_free and all(keys[h] == keys[H[0]] for h in H[1:]):
        return Fraction(0)
    return _affine_exact(exp, records, primes, budget)


def _affine_exact(exp: Experiment, records, primes, budget: int) -> Fraction:
    """Pointwise exact distributions, after quotienting by the noise shared by all branches."""
    q = exp.modulus
    proj = {}
    for p in primes:
        ann = []
        D = None
        for _, _, cols, _, D in records:
            ann.extend(gfp.nullspace([[a % p for a in col] for col in cols], D, p))
        A, _ = gfp.rref(ann, p) if ann else ([], [])
        proj[p] = A
    labels = exp.labels()
    total = 0
    dists = []
    for h, s in labels:
        dist: dict = defaultdict(Fraction)
        for weight, base, cols, bcols, D in records:
            tag, x = base[h]
            off = list(x)
            for coef, col in zip(s, bcols):
                if coef:
                    off = [(a + coef * b) % q for a, b in zip(off, col)]
            per_prime = []
            for p in primes:
                A = proj[p]
                o = gfp.matvec(A, [a % p for a in off], p)
                img = [gfp.matvec(A, [a % p for a in col], p) for col in cols]
                gb, _ = gfp.rref([list(v) for v in img], p) if img and A else ([], [])
                pts = [tuple((a + b) % p for a, b in zip(o, pt)) for pt in gfp.span_points(gb, len(A), p)]
                per_prime.append(pts)
            n = 1
            for pts in per_prime:
                n *= len(pts)
            total += n
            if total > budget:
                raise Intractable(f"exact coset enumeration exceeds {budget} points")
            w = weight / n
            for combo in itertools.product(*per_prime):
                dist[(tag, combo)] += w
        dists.append(dict(dist))
    return max_pairwise(dists, budget)


def affine(exp: Experiment, sets: Sequence[CorruptionSet], budget: int = DEFAULT_BUDGET, reverse: bool = False):
    branches, runs = _affine_tables(exp, budget, reverse)
    return {c: (_affine_case(exp, branches, c, budget), runs) for c in sets}


# experiments

@dataclass(frozen=True)
class AuditScenario:
    protocol: Protocol
    carrier: GroupSpec
    v: int
    setsystem: SetSystem
    bundle_width: int = 1
    transfer_mode: TransferMode = TransferMode.RESHARE
    engine: Engine = Engine.IDEAL
    name: str = "scenario"

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        object.__setattr__(self, "transfer_mode", TransferMode(self.transfer_mode))
        object.__setattr__(self, "engine", Engine(self.engine))

    @property
    def t(self) -> int:
        return self.setsystem.t

    @property
    def dealer(self) -> str:
        return "receiver" if self.protocol is Protocol.P1 else "cge"

    def config(self) -> MixConfig:
        return MixConfig(self.setsystem, self.carrier, self.protocol, self.transfer_mode,
                         self.bundle_width, self.engine, self.dealer).validate()

    def universe(self) -> list[str]:
        return party_universe(self.setsystem, self.v)


def _elements_from(spec: GroupSpec, coords: Sequence[int], count: int) -> list[GroupElement]:
    l = spec.param
    return [GroupElement._unchecked(spec, tuple(int(x) % spec.modulus for x in coords[k * l:(k + 1) * l]))
            for k in range(count)]


def _fixed_values(spec: GroupSpec, count: int) -> list[GroupElement]:
    """Deterministic distinct-where-possible payloads: the k-th is k written in base |coords|."""
    out = []
    if spec.kind is Kind.PERM:
        elems = all_elements(spec)
        return [elems[(k * 5 + 1) % len(elems)] for k in range(count)]
    m, l = spec.modulus, spec.param
    for k in range(count):
        x, digs = k, []
        for _ in range(l):
            digs.append(x % m)
            x //= m
        out.append(GroupElement._unchecked(spec, tuple(reversed(digs))))
    return out


def privacy_experiment(sc: AuditScenario, target: str = "payload") -> Experiment:
    """Secrecy of what is transmitted.

    ``payload``: the dealer's pads/codes/permutations, forward pass only.
    ``message``: (didactic protocol) the senders' reply messages, full run,
    pads drawn at random by the receiver.
    """
    cfg = sc.config()
    v, c = sc.v, sc.bundle_width
    spec = sc.carrier
    base = dict(universe=sc.universe(), setsystem=sc.setsystem, t=sc.t)
    if sc.protocol is Protocol.P3:
        if target != "payload":
            raise ValueError("the permutation protocol only has a payload target")
        hyps = [tuple(p) for p in itertools.product(all_elements(spec), repeat=v)]

        def run(src, h, s):
            tr = Transcript(sc.name)
            forward_p3(list(h), cfg, src, tr)
            return tr

        note = "modulo ideal functionality" if sc.engine is Engine.IDEAL else None
        return Experiment(f"{sc.name}/privacy", "privacy", run, hyps, note=note, **base)

    l = spec.param
    if target == "payload":
        S = v * c * l

        def run(src, h, s):
            tr = Transcript(sc.name)
            vals = _elements_from(spec, s, v * c)
            rows = [vals[i * c:(i + 1) * c] for i in range(v)]
            if sc.protocol is Protocol.P1:
                forward_p1([r[0] for r in rows], cfg, src, tr)
            else:
                forward_p2(rows, cfg, src, tr)
            return tr

        return Experiment(f"{sc.name}/privacy", "privacy", run, [None], S, spec, **base)

    if target == "message":
        if sc.protocol is not Protocol.P1:
            raise ValueError("message privacy is defined for the didactic protocol")
        S = v * l

        def run(src, h, s):
            tr = Transcript(sc.name)
            pads = [sample_uniform(spec, src) for _ in range(v)]
            fwd = forward_p1(pads, cfg, src, tr)
            msgs = _elements_from(spec, s, v)
            replies = [op(msgs[i], reconstruct(fwd.delivered[i])) for i in range(v)]
            reply_p1(replies, fwd.secrets, cfg, tr)
            return tr

        return Experiment(f"{sc.name}/privacy-message", "privacy", run, [None], S, spec, **base)
    raise ValueError(f"unknown privacy target {target!r}")


def anonymity_experiment(sc: AuditScenario) -> Experiment:
    """Who sent what.  Payloads are fixed and known; the hypothesis is the
    assignment tau of messages (or votes) to final slots, i.e. to senders."""
    cfg = sc.config()
    v, c = sc.v, sc.bundle_width
    spec = sc.carrier
    taus = list(itertools.permutations(range(v)))
    base = dict(universe=sc.universe(), setsystem=sc.setsystem, t=sc.t)

    if sc.protocol is Protocol.P1:
        msgs = _fixed_values(spec, v)

        def run(src, tau, s):
            tr = Transcript(sc.name)
            pads = [sample_uniform(spec, src) for _ in range(v)]
            fwd = forward_p1(pads, cfg, src, tr)
            replies = [op(msgs[tau[i]], reconstruct(fwd.delivered[i])) for i in range(v)]
            reply_p1(replies, fwd.secrets, cfg, tr)
            return tr

        return Experiment(f"{sc.name}/anonymity", "anonymity", run, taus, 0, spec,
                          observer="receiver", **base)

    if sc.protocol is Protocol.P2:
        vals = _fixed_values(spec, v * c)
        book = [vals[i * c:(i + 1) * c] for i in range(v)]
        intents = [1 + (i % c) for i in range(v)]

        def run(src, tau, s):
            tr = Transcript(sc.name)
            fwd = forward_p2(book, cfg, src, tr)
            items = []
            for i in range(v):
                agent = VoterAgent(i + 1, sc.t, (intents[tau[i]],))
                receive_shares(agent, fwd.delivered[i])
                for bl in cast(agent, human_reconstruct(agent, agent.intent[0])):
                    items.append((bl.slot, bl.value))
            reply_p2(items, fwd.secrets, cfg, tr)
            return tr

        side = lambda tau: ("codebook", tuple(tuple(x for x in row) for row in book))
        return Experiment(f"{sc.name}/anonymity", "anonymity", run, taus, 0, spec,
                          observer="cge", side=side, **base)

    pis = _fixed_values(spec, v)
    cands = spec.param
    intents = [1 + (i % cands) for i in range(v)]

    def run(src, tau, s):
        tr = Transcript(sc.name)
        fwd = forward_p3(pis, cfg, src, tr)
        items = []
        for i in range(v):
            agent = VoterAgent(i + 1, sc.t, (intents[tau[i]],))
            receive_shares(agent, fwd.delivered[i])
            for bl in cast(agent, human_reconstruct(agent)):
                items.append((bl.slot, bl.value))
        reply_p3(items, fwd.secrets, cfg, tr)
        return tr

    side = lambda tau: ("codebook", tuple(pis))
    note = "modulo ideal functionality" if sc.engine is Engine.IDEAL else None
    return Experiment(f"{sc.name}/anonymity", "anonymity", run, taus, 0, None,
                      observer="cge", side=side, note=note, **base)


def product_experiment(c: int = 3, t: int = 1, omega: GroupElement | None = None,
                       engine: Engine = Engine.CONCRETE) -> Experiment:
    """Privacy of the group-product subprotocol on its own.

    Hypothesis: the secret pi (shared by a dealer among P_1..P_{t+1}).  The
    modifier omega is fixed and public; its shares are drawn by Q_1, the leader.
    """
    spec = perms(c)
    n = t + 1
    omega = omega if omega is not None else _fixed_values(spec, 2)[1]
    P = [f"P{j}" for j in range(1, n + 1)]
    Q = [f"Q{j}" for j in range(1, n + 1)]

    def run(src, pi, s):
        tr = Transcript("product")
        p = _raw_share(pi, t, src)
        for j in range(n):
            tr.emit("cge", P[j], "share", 1, 1, p[j])
        w = _raw_share(omega, t, src)
        tr.emit(Q[0], tuple(Q), "modifier", 1, 2, Split(w))
        _product_raw(p, w, P, Q, Engine(engine), src, tr, 1, 2)
        return tr

    return Experiment(f"group_product/S{c}/t{t}/{Engine(engine).value}", "privacy", run,
                      all_elements(spec), universe=P + Q, t=t)


# driving audits

def _method_for(exp: Experiment, method: str) -> str:
    if method != "auto":
        return method
    return "affine" if exp.linear_spec is not None else "brute"


def run_cases(exp: Experiment, sets: Sequence[CorruptionSet], expected: str = PASS, method: str = "auto",
              budget: int = DEFAULT_BUDGET, reverse: bool = False, check_honesty: bool = True) -> list[CaseResult]:
    """Audit ``exp`` for every corruption set; all sets share one enumeration."""
    method = _method_for(exp, method)
    if check_honesty and expected == PASS and exp.setsystem is not None:
        for cs in sets:
            ids = cs.server_ids()
            if len(ids) <= exp.t and existential_honesty(exp.setsystem, ids) is None:
                raise AssertionError(f"no corruption-free block for {cs}")
    t0 = time.perf_counter()
    try:
        if method == "affine":
            res = affine(exp, sets, budget, reverse)
        elif method == "brute":
            res = brute_force(exp, sets, budget, reverse)
        else:
            raise ValueError(f"unknown method {method!r}")
    except Intractable:
        wall = time.perf_counter() - t0
        return [CaseResult(exp.name, exp.prop, cs, None, INTRACTABLE, expected, 0, method, wall, exp.note)
                for cs in sets]
    wall = time.perf_counter() - t0
    out = []
    for cs in sets:
        dist, states = res[cs]
        out.append(CaseResult(exp.name, exp.prop, cs, dist, PASS if dist == 0 else FAIL, expected,
                              states, method, wall / max(1, len(sets)), exp.note))
    return out


def corruption_family(exp: Experiment, max_size: int | None = None, with_observer: bool = False) -> list[CorruptionSet]:
    size = exp.t if max_size is None else max_size
    sets = all_subsets(exp.universe, size)
    if with_observer and exp.observer is not None:
        sets += all_subsets(exp.universe, size, exp.observer)
    return sets


def audit_privacy(sc: AuditScenario, sets: Sequence[CorruptionSet] | None = None, target: str = "payload",
                  secrets_domain=None, method: str = "auto", budget: int = DEFAULT_BUDGET,
                  expected: str = PASS, reverse: bool = False) -> list[CaseResult]:
    exp = privacy_experiment(sc, target)
    if secrets_domain is not None:
        exp.secret_domain = [tuple(s) for s in secrets_domain]
    if sets is None:
        sets = corruption_family(exp)
    return run_cases(exp, sets, expected, method, budget, reverse)


def audit_anonymity(sc: AuditScenario, sets: Sequence[CorruptionSet] | None = None, method: str = "auto",
                    budget: int = DEFAULT_BUDGET, expected: str = PASS, with_observer: bool = True,
                    reverse: bool = False) -> list[CaseResult]:
    exp = anonymity_experiment(sc)
    if sets is None:
        sets = corruption_family(exp, with_observer=with_observer)
    return run_cases(exp, sets, expected, method, budget, reverse)


def negative_controls(sc: AuditScenario, method: str = "auto", budget: int = DEFAULT_BUDGET) -> list[CaseResult]:
    """Cases that must FAIL: a fully corrupted first block (privacy) and, for the
    didactic protocol, one corrupted leader in every block plus the receiver
    (anonymity)."""
    out = []
    block1 = CorruptionSet(frozenset(server(x) for x in sc.setsystem.blocks[0]))
    exp = privacy_experiment(sc)
    if exp.secret_dim:
        # two payload vectors differing in every coordinate suffice to expose the leak
        exp.secret_domain = [(0,) * exp.secret_dim, (1,) * exp.secret_dim]
        exp.note = "secrets domain {0...0, 1...1}"
    out += run_cases(exp, [block1], FAIL, method, budget)
    if sc.protocol is Protocol.P1:
        # messages only surface in the clear at the receiver, so it observes too
        leaders = CorruptionSet(frozenset(server(blk[0]) for blk in sc.setsystem.blocks), sc.dealer)
        out += audit_anonymity(sc, [leaders], method=method, budget=budget, expected=FAIL)
    return out
