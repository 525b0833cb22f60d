from fractions import Fraction

import pytest

from mixvote.adversary.audit import (
    FAIL,
    INTRACTABLE,
    PASS,
    AuditScenario,
    anonymity_experiment,
    audit_anonymity,
    audit_privacy,
    brute_force,
    affine,
    corruption_family,
    max_pairwise,
    negative_controls,
    privacy_experiment,
    run_cases,
    tv_distance,
)
from mixvote.adversary.enumerate import TreeSource, tree_size, walk_tree
from mixvote.adversary.views import CorruptionSet, all_subsets, capture
from mixvote.groups import bits, digits, element
from mixvote.mixnet import MixConfig, Protocol, forward_p1, forward_p2
from mixvote.rng import SeededSource
from mixvote.setsystem import build_disjoint
from mixvote.transcript import Transcript


def _p1(v=2, spec=None, t=1):
    return AuditScenario("p1", spec or bits(1), v, build_disjoint(t), name="p1")


def _p2(v=1, c=2, spec=None, mode="reshare"):
    return AuditScenario("p2", spec or bits(1), v, build_disjoint(1), c, mode, name="p2")


# views

def test_empty_corruption_sees_nothing():
    sc = _p1()
    tr = Transcript()
    forward_p1([element(bits(1), "1")] * 2, sc.config(), SeededSource(1), tr)
    assert capture(tr, CorruptionSet.of()) == []


def test_single_server_view_is_its_projection():
    sc = _p1()
    tr = Transcript()
    forward_p1([element(bits(1), "1")] * 2, sc.config(), SeededSource(2), tr)
    view = capture(tr, CorruptionSet.of("server:2"))
    kinds = sorted({e.kind for e in view})
    assert kinds == ["modifier", "perm_announce", "share"]
    for e in view:
        assert e.src == "server:2" or "server:2" in (e.dst if isinstance(e.dst, tuple) else (e.dst,))
    # the modifier broadcast is split: server 2 only learns its own column
    mod = [e for e in view if e.kind == "modifier" and e.level == 1][0]
    assert mod.observed[0][0] == 1 and len(mod.observed) == 1


def test_device_view_has_one_share_per_code():
    sc = _p2(v=2, c=3, spec=digits(2))
    tr = Transcript()
    codes = [[element(digits(2), f"{i}{k}") for k in range(3)] for i in range(2)]
    forward_p2(codes, sc.config(), SeededSource(3), tr)
    view = capture(tr, CorruptionSet.of("device:2:1"))
    assert len(view) == 1 and len(view[0].observed) == 3


# exact distances

def test_tv_distance():
    assert tv_distance({"a": Fraction(1)}, {"b": Fraction(1)}) == 1
    assert tv_distance({"a": Fraction(1, 2), "b": Fraction(1, 2)}, {"a": Fraction(1)}) == Fraction(1, 2)
    assert max_pairwise([{"a": Fraction(1)}] * 3) == 0


def test_digit_single_server_privacy_is_exact_zero():
    sc = AuditScenario("p2", digits(1), 1, build_disjoint(1), 1, name="z10")
    res = audit_privacy(sc)
    assert res and all(r.distance == 0 and r.verdict == PASS for r in res)


def test_full_block_leaks_payload():
    sc = AuditScenario("p2", digits(1), 1, build_disjoint(1), 1, name="z10")
    blk = [r for r in negative_controls(sc)]
    assert blk[0].verdict == FAIL and blk[0].distance == 1


def test_p1_leaders_and_receiver_link_senders():
    res = negative_controls(_p1())
    assert [r.prop for r in res] == ["privacy", "anonymity"]
    assert all(r.distance == 1 and r.ok for r in res)


def test_t0_without_corruption_is_vacuous_pass():
    sc = _p1(v=2, t=0)
    res = audit_privacy(sc, [CorruptionSet.of()])
    assert res[0].verdict == PASS and res[0].distance == 0


def test_budget_gives_intractable():
    res = audit_anonymity(_p1(), budget=3)
    assert res and all(r.verdict == INTRACTABLE and r.distance is None for r in res)


# the two exact methods must agree

def _both(exp, sets):
    return affine(exp, sets), brute_force(exp, sets)


def test_affine_matches_brute_on_p1_payload_pairs():
    exp = privacy_experiment(_p1())
    sets = all_subsets(exp.universe, 2)
    a, b = _both(exp, sets)
    assert {cs: a[cs][0] for cs in sets} == {cs: b[cs][0] for cs in sets}
    assert any(a[cs][0] > 0 for cs in sets)


def test_affine_matches_brute_on_p1_anonymity():
    exp = anonymity_experiment(_p1())
    sets = corruption_family(exp, 1, with_observer=True)
    sets.append(CorruptionSet.of("server:1", "server:3", observer="receiver"))
    a, b = _both(exp, sets)
    assert a[sets[-1]][0] == 1
    assert {cs: a[cs][0] for cs in sets} == {cs: b[cs][0] for cs in sets}


def test_affine_matches_brute_on_p2_payload():
    exp = privacy_experiment(_p2(c=1))
    sets = corruption_family(exp, 2)
    a, b = _both(exp, sets)
    assert {cs: a[cs][0] for cs in sets} == {cs: b[cs][0] for cs in sets}


def test_reverse_enumeration_gives_same_distances():
    exp = anonymity_experiment(_p1())
    sets = corruption_family(exp, 1, with_observer=True)
    fwd = {r.corruption: r.distance for r in run_cases(exp, sets)}
    rev = {r.corruption: r.distance for r in run_cases(exp, sets, reverse=True)}
    assert fwd == rev


def test_walk_tree_weights_sum_to_one():
    def fn(src):
        return src.randbelow(3), src.scalars(2, 2)

    total = sum(Fraction(1, den) for _, den in walk_tree(fn))
    assert total == 1 and tree_size(fn) == 12


def test_tree_source_reverse_mirrors_draws():
    a, b = TreeSource([1]), TreeSource([1], reverse=True)
    assert a.randbelow(4) == 1 and b.randbelow(4) == 2
