"""The ten acceptance criteria.  Each test carries an ``acceptance`` marker;
conftest prints one PASS/FAIL line per criterion at the end of the run."""

import hashlib
import itertools
import json
from pathlib import Path

import pytest

import mixvote
from mixvote.adversary.audit import (
    FAIL,
    PASS,
    AuditScenario,
    anonymity_experiment,
    brute_force,
    corruption_family,
    negative_controls,
    privacy_experiment,
    product_experiment,
    run_cases,
)
from mixvote.adversary.views import all_subsets
from mixvote.cli import main
from mixvote.groups import all_elements, bits, digits, element, op, perms, sample_uniform
from mixvote.mixnet import (
    Engine,
    MixConfig,
    Protocol,
    forward_p1,
    forward_p2,
    forward_p3,
    group_product,
    reply_p1,
    reply_p2,
    reply_p3,
)
from mixvote.rng import SeededSource
from mixvote.setsystem import (
    InfeasibleError,
    SetSystem,
    build_dag,
    build_disjoint,
    build_greedy,
    check_confinement,
    check_t_cut,
    random_system,
    verify_verifiers,
)
from mixvote.sharing import reconstruct, share
from mixvote.voting import SeatMode, decode_and_tally, expected_tally, generate_codes, run_election

from .oracles import is_verifier_system

DATA = Path(mixvote.__file__).parent / "data"
acceptance = pytest.mark.acceptance


def _random_intents(v, c, rng):
    # candidate 0 means abstain
    out = {}
    for i in range(1, v + 1):
        x = rng.randbelow(c + 1)
        out[i] = [x] if x else []
    return out


# 1

@acceptance(1, "single-seat tally grid")
def test_single_seat_grid(stopwatch):
    mismatches = runs = 0
    for v in range(1, 7):
        for c in range(2, 5):
            for t in range(3):
                s = build_disjoint(t)
                for mode in ("reshare", "confinement"):
                    for seed in range(100):
                        rng = SeededSource(f"grid/{v}/{c}/{t}/{mode}/{seed}")
                        intents = _random_intents(v, c, rng)
                        out = run_election(v, c, SeatMode.single(), s, intents, rng, transfer_mode=mode)
                        runs += 1
                        if out.tally.counts != expected_tally(intents, v, c) or out.tally.rejected:
                            mismatches += 1
    assert runs == 10800 and mismatches == 0
    assert stopwatch() < 60


# 2

@acceptance(2, "multi-seat decoding grid")
def test_multi_seat_grid(stopwatch):
    checked = 0
    for v in range(1, 4):
        for c in range(2, 5):
            for seats in range(1, c + 1):
                choices = [set(x) for k in range(1, seats + 1) for x in itertools.combinations(range(1, c + 1), k)]
                for t in (0, 1):
                    rng = SeededSource(f"multi/{v}/{c}/{seats}/{t}")
                    book = generate_codes(v, c, SeatMode.multi_seat(seats), None, rng)
                    cfg = MixConfig(build_disjoint(t), perms(c), Protocol.P3)
                    fwd = forward_p3(list(book.tuples), cfg, rng)
                    for slot in range(1, v + 1):
                        held = reconstruct(fwd.delivered[slot - 1])
                        origin = fwd.secrets.origin(slot)
                        for want in choices:
                            items = [(slot, held(x)) for x in sorted(want)]
                            rec = reply_p3(items, fwd.secrets, cfg)
                            assert all(o == origin for o, _ in rec)
                            tally = decode_and_tally(rec, book)
                            assert tally.rejected == 0
                            assert {k for k, n in tally.counts.items() if n} == want
                            assert all(n <= 1 for n in tally.counts.values())
                            checked += 1
                    # and one full election with mixed intents
                    intents = {i: sorted(choices[(i * 7 + seats) % len(choices)]) for i in range(1, v + 1)}
                    out = run_election(v, c, SeatMode.multi_seat(seats), build_disjoint(t), intents, rng)
                    assert out.tally.counts == expected_tally(intents, v, c)
    assert checked == 768
    assert stopwatch() < 60


# 3 and 4

def _privacy_scenarios():
    s = build_disjoint(1)
    for spec in (digits(1), bits(1)):
        for v in (1, 2):
            yield AuditScenario("p1", spec, v, s, name=f"p1/{spec}/v{v}")
            for c in (1, 2):
                for mode in ("reshare", "confinement"):
                    yield AuditScenario("p2", spec, v, s, c, mode, name=f"p2/{spec}/v{v}/c{c}/{mode}")


def _anonymity_scenarios():
    s = build_disjoint(1)
    for spec in (digits(1), bits(1)):
        yield AuditScenario("p1", spec, 2, s, name=f"p1/{spec}")
        for c, mode in ((1, "reshare"), (2, "reshare"), (1, "confinement")):
            yield AuditScenario("p2", spec, 2, s, c, mode, name=f"p2/{spec}/c{c}/{mode}")


@acceptance(3, "exact privacy, single corruptions")
def test_privacy_audit(stopwatch):
    cases = []
    for sc in _privacy_scenarios():
        targets = ("payload", "message") if sc.protocol is Protocol.P1 else ("payload",)
        for target in targets:
            exp = privacy_experiment(sc, target)
            cases += run_cases(exp, corruption_family(exp, 1))
    bad = [(c.experiment, str(c.corruption), c.distance) for c in cases if c.distance != 0]
    assert not bad
    # per carrier: p1 two targets at v=1,2 (7 and 9 sets), p2 four configs at v=1,2
    assert len(cases) == 2 * (2 * (7 + 9) + 4 * (7 + 9))
    assert all(c.verdict == PASS for c in cases)
    assert stopwatch() < 300


@acceptance(4, "exact anonymity with colluding observer")
def test_anonymity_audit(stopwatch):
    cases = []
    for sc in _anonymity_scenarios():
        exp = anonymity_experiment(sc)
        sets = corruption_family(exp, 1, with_observer=True)
        assert any(cs.observer in ("cge", "receiver") for cs in sets)
        cases += run_cases(exp, sets)
    bad = [(c.experiment, str(c.corruption), c.distance) for c in cases if c.distance != 0]
    assert not bad
    assert stopwatch() < 300


# 5

@acceptance(5, "negative controls fail")
def test_negative_controls(stopwatch):
    s = build_disjoint(1)
    scenarios = [AuditScenario("p1", spec, 2, s, name="p1") for spec in (digits(1), bits(1))]
    scenarios += [AuditScenario("p2", spec, 2, s, 2, name="p2") for spec in (digits(1), bits(1))]
    for sc in scenarios:
        res = negative_controls(sc)
        props = [r.prop for r in res]
        assert props == (["privacy", "anonymity"] if sc.protocol is Protocol.P1 else ["privacy"])
        for r in res:
            assert r.expected == FAIL and r.verdict == FAIL and r.distance > 0, r
        # the anonymity control really uses one server per block, t+1 in all
        if sc.protocol is Protocol.P1:
            assert len(res[1].corruption.parties) == sc.t + 1


# 6

@acceptance(6, "set-system suite")
def test_setsystem_suite(stopwatch):
    for t in range(5):
        s = build_disjoint(t)
        assert verify_verifiers(s) and check_confinement(s)
    rng = SeededSource("criterion-6")
    passing = 0
    for k in range(200):
        m = 1 + rng.randbelow(10)
        t = rng.randbelow(3)
        s = random_system(m, t, 1 + rng.randbelow(6), rng, exact_size=k % 4 != 0)
        rep = verify_verifiers(s)
        ok, _ = is_verifier_system(m, t, s.blocks)
        assert bool(rep) == ok, s
        passing += ok
        if not ok and rep.condition == "free-block":
            # the witness really meets every block
            assert len(rep.witness) <= t and all(rep.witness & set(b) for b in s.blocks)
    assert 10 < passing < 190
    rep = verify_verifiers(SetSystem(3, 1, [(1, 2), (2, 3)]))
    assert not rep and rep.witness == frozenset({2})
    assert stopwatch() < 30


# 7

@acceptance(7, "virtual DAG cut")
def test_dag_cut(stopwatch):
    systems = []
    for m in range(1, 13):
        for t in range(4):
            for seed in (None, 1, 2):
                try:
                    systems.append(build_greedy(m, t, SeededSource(seed) if seed else None))
                except InfeasibleError:
                    pass
    systems += [build_disjoint(t) for t in range(3)]
    rng = SeededSource("criterion-7")
    while len(systems) < 200:
        m, t = 2 + rng.randbelow(11), rng.randbelow(4)
        s = random_system(m, t, 2 + rng.randbelow(5), rng)
        if verify_verifiers(s):
            systems.append(s)
    confined = 0
    for s in systems:
        assert verify_verifiers(s)
        assert check_t_cut(build_dag(s, "reshare"), s.t), s
        if check_confinement(s):
            confined += 1
            assert check_t_cut(build_dag(s, "confinement"), s.t), s
    assert confined > 0
    crossed = SetSystem(3, 1, [(1, 2), (3, 1)])
    assert not check_confinement(crossed)
    assert not check_t_cut(build_dag(crossed, "confinement"), 1)
    shipped = SetSystem.from_json(json.loads((DATA / "confinement_violating.json").read_text()))
    assert verify_verifiers(shipped) and not check_confinement(shipped)
    assert not check_t_cut(build_dag(shipped, "confinement"), 1)
    assert stopwatch() < 60


# 8

def _system(rng):
    t = rng.randbelow(3)
    if rng.randbelow(2):
        return build_disjoint(t)
    return build_greedy(2 * t + 1 + rng.randbelow(3), t, rng)


@acceptance(8, "forward then reply is the identity")
def test_roundtrips(stopwatch):
    rng = SeededSource("criterion-8")
    for _ in range(1000):
        t, v = rng.randbelow(3), 1 + rng.randbelow(5)
        spec = bits(1 + rng.randbelow(8))
        cfg = MixConfig(build_disjoint(t), spec, Protocol.P1, dealer="receiver")
        pads = [sample_uniform(spec, rng) for _ in range(v)]
        msgs = [sample_uniform(spec, rng) for _ in range(v)]
        fwd = forward_p1(pads, cfg, rng)
        replies = [op(reconstruct(fwd.delivered[s]), msgs[fwd.secrets.origin(s + 1) - 1]) for s in range(v)]
        back = reply_p1(replies, fwd.secrets, cfg)
        assert [op(back[i], pads[i]) for i in range(v)] == msgs
    for _ in range(1000):
        s = _system(rng)
        mode = "confinement" if check_confinement(s) and rng.randbelow(2) else "reshare"
        v, c = 1 + rng.randbelow(5), 1 + rng.randbelow(4)
        spec = digits(1 + rng.randbelow(6))
        cfg = MixConfig(s, spec, Protocol.P2, mode, c)
        codes = [[sample_uniform(spec, rng) for _ in range(c)] for _ in range(v)]
        fwd = forward_p2(codes, cfg, rng)
        pick = [rng.randbelow(c) for _ in range(v)]
        items = [(slot, reconstruct(fwd.delivered[slot - 1][pick[slot - 1]])) for slot in range(1, v + 1)]
        back = reply_p2(items, fwd.secrets, cfg)
        want = {}
        for slot in range(1, v + 1):
            o = fwd.secrets.origin(slot)
            want[o] = codes[o - 1][pick[slot - 1]]
        assert dict(back) == want and len(back) == v
    for k in range(1000):
        s = _system(rng)
        if s.b < 2 or any(s.blocks[i] == s.blocks[i + 1] for i in range(s.b - 1)):
            s = build_disjoint(s.t)
        c, v = 2 + rng.randbelow(3), 1 + rng.randbelow(4)
        engine = Engine.CONCRETE if k % 5 == 0 else Engine.IDEAL
        cfg = MixConfig(s, perms(c), Protocol.P3, engine=engine)
        pis = [sample_uniform(perms(c), rng) for _ in range(v)]
        fwd = forward_p3(pis, cfg, rng)
        xs = [1 + rng.randbelow(c) for _ in range(v)]
        items = [(slot, reconstruct(fwd.delivered[slot - 1])(xs[slot - 1])) for slot in range(1, v + 1)]
        back = reply_p3(items, fwd.secrets, cfg)
        want = sorted((fwd.secrets.origin(slot), pis[fwd.secrets.origin(slot) - 1](xs[slot - 1]))
                      for slot in range(1, v + 1))
        assert back == want
    assert stopwatch() < 30


# 9

@acceptance(9, "group product over S_3")
def test_group_product_exhaustive(stopwatch):
    sp = perms(3)
    rng = SeededSource("criterion-9")
    pairs = 0
    for engine in Engine:
        for om in all_elements(sp):
            for pi in all_elements(sp):
                got = group_product(share(pi, 1, rng), share(om, 1, rng), engine, rng)
                assert reconstruct(got) == op(om, pi)
                pairs += engine is Engine.CONCRETE
    assert pairs == 36
    exp = product_experiment(3, 1, engine=Engine.CONCRETE)
    sets = all_subsets(exp.universe, 1)
    res = brute_force(exp, sets)
    assert len(sets) == 5 and all(res[cs][0] == 0 for cs in sets)
    assert stopwatch() < 60


# 10

def _scenarios(tmp: Path) -> list[tuple[str, Path]]:
    base_single = json.loads((DATA / "sample_single.json").read_text())
    base_multi = json.loads((DATA / "sample_multi.json").read_text())
    out = []

    def add(kind, obj, name):
        p = tmp / f"{name}.json"
        p.write_text(json.dumps(obj))
        out.append((kind, p))

    for seed in range(4):
        for mode in ("reshare", "confinement"):
            obj = json.loads(json.dumps(base_single))
            obj["seed"] = seed
            obj["mix"]["transfer_mode"] = mode
            add("run", obj, f"single-{seed}-{mode}")
    for seed in range(3):
        obj = json.loads(json.dumps(base_single))
        obj["seed"] = 100 + seed
        obj["mix"].update({"setsystem": "greedy", "m": 5 + seed})
        add("run", obj, f"greedy-{seed}")
    for seed, engine in ((0, "ideal"), (1, "ideal"), (2, "concrete"), (3, "concrete")):
        obj = json.loads(json.dumps(base_multi))
        obj["seed"] = seed
        obj["mix"]["engine"] = engine
        add("run", obj, f"multi-{seed}-{engine}")
    add("audit", json.loads((DATA / "audit_p1.json").read_text()), "audit-p1")
    add("audit", json.loads((DATA / "audit_p2.json").read_text()), "audit-p2")
    for spec in ("bits:1", "digits:1"):
        obj = json.loads((DATA / "audit_p1.json").read_text())
        obj["mix"]["carrier"] = spec
        obj["name"] = f"audit-p1-{spec}"
        add("audit", obj, f"audit-p1-{spec.replace(':', '')}")
    obj = json.loads((DATA / "audit_p2.json").read_text())
    obj["mix"]["transfer_mode"] = "confinement"
    obj["election"]["c"] = 1
    obj["intents"] = {"1": [1], "2": [1]}
    add("audit", obj, "audit-p2-conf")
    return out


def _digest(kind, path, out_dir: Path, capsys) -> str:
    if kind == "run":
        code = main(["run", str(path), "--out", str(out_dir)])
        files = ["transcript.jsonl", "tally.json", "cge.json"]
    else:
        code = main(["audit", str(path), "--negative-controls", "--out", str(out_dir / "report.json")])
        files = ["report.json"]
    captured = capsys.readouterr().out
    assert code == 0, (path.name, captured[-500:])
    h = hashlib.sha256(captured.encode())
    for f in files:
        h.update((out_dir / f).read_bytes())
    return h.hexdigest()


@acceptance(10, "byte-identical reruns")
def test_determinism(tmp_path, capsys, stopwatch):
    scenarios = _scenarios(tmp_path)
    assert len(scenarios) == 20
    first = [_digest(kind, p, tmp_path / "a" / p.stem, capsys) for kind, p in scenarios]
    second = [_digest(kind, p, tmp_path / "b" / p.stem, capsys) for kind, p in scenarios]
    assert first == second
    assert len(set(first)) == 20
