import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixvote.groups import digits, element, perms
from mixvote.mixnet import ConfigError, MixConfig, Protocol
from mixvote.rng import SeededSource
from mixvote.setsystem import build_disjoint, build_greedy
from mixvote.voting import (
    CodeBook,
    CodeSpaceError,
    SeatMode,
    decode_and_tally,
    dispatch,
    expected_tally,
    generate_codes,
    normalize_intents,
    recovered_from_records,
    run_election,
)


def test_codes_are_distinct():
    book = generate_codes(2, 2, SeatMode.single(), digits(4), SeededSource(1))
    flat = [x for row in book.tuples for x in row]
    assert len(flat) == 4 and len({x.value for x in flat}) == 4
    assert all(len(x.value) == 4 for x in flat)


def test_multi_seat_book_shape():
    book = generate_codes(3, 3, SeatMode.multi_seat(2), None, SeededSource(2))
    assert len(book.tuples) == 3 and all(p.spec == perms(3) for p in book.tuples)


def test_code_space_too_small():
    # a zero-length code space cannot even be named
    with pytest.raises(ValueError):
        generate_codes(2, 2, SeatMode.single(), digits(0), SeededSource(3))
    with pytest.raises(CodeSpaceError):
        generate_codes(4, 3, SeatMode.single(), digits(1), SeededSource(3))


def test_tally_counts():
    d = digits(2)
    rows = ((element(d, "10"), element(d, "11")), (element(d, "20"), element(d, "21")),
            (element(d, "30"), element(d, "31")))
    book = CodeBook("e", SeatMode.single(), d, 2, rows)
    res = decode_and_tally([(1, rows[0][0]), (2, rows[1][1]), (3, rows[2][0])], book)
    assert res.counts == {1: 2, 2: 1} and res.rejected == 0


def test_unknown_or_misplaced_code_rejected():
    d = digits(2)
    rows = ((element(d, "10"), element(d, "11")), (element(d, "20"), element(d, "21")))
    book = CodeBook("e", SeatMode.single(), d, 2, rows)
    assert decode_and_tally([(1, element(d, "99"))], book).rejected == 1
    # a valid code arriving at the wrong tuple index is not counted
    assert decode_and_tally([(1, rows[1][0])], book).rejected == 1


def test_multi_seat_inverse_lookup():
    book = CodeBook("e", SeatMode.multi_seat(1), perms(3), 3, (element(perms(3), "2,3,1"),))
    res = decode_and_tally([(1, 3)], book)
    assert res.counts == {1: 0, 2: 1, 3: 0}


def test_dispatch_checks_protocol():
    book = generate_codes(2, 2, SeatMode.single(), digits(3), SeededSource(4))
    cfg = MixConfig(build_disjoint(1), digits(3), Protocol.P3)
    with pytest.raises(ConfigError):
        dispatch(book, cfg, SeededSource(5))


def test_codebook_json_roundtrip():
    for mode in (SeatMode.single(), SeatMode.multi_seat(2)):
        book = generate_codes(3, 3, mode, digits(5), SeededSource(6))
        again = CodeBook.from_json(json.loads(json.dumps(book.to_json())))
        assert again == book


def test_codebook_holds_no_voter_identity():
    book = generate_codes(2, 2, SeatMode.single(), digits(3), SeededSource(7))
    assert "voter" not in json.dumps(book.to_json())


def test_normalize_intents():
    assert normalize_intents({"2": [1], 3: 2}, 3) == {1: (), 2: (1,), 3: (2,)}
    with pytest.raises(ValueError):
        normalize_intents({"4": [1]}, 3)


@pytest.mark.parametrize("mode", [SeatMode.single(), SeatMode.multi_seat(2)])
def test_election_end_to_end(mode):
    intents = {1: [2], 2: [1], 3: [2]} if not mode.multi else {1: [1, 3], 2: [2], 3: [3, 2]}
    out = run_election(3, 3, mode, build_disjoint(1), intents, SeededSource(8), code_spec=digits(6))
    assert out.tally.counts == expected_tally(intents, 3, 3)
    assert out.tally.rejected == 0
    again = decode_and_tally(recovered_from_records(
        [out.transcript.record(e) for e in out.transcript], out.book), out.book)
    assert again.counts == out.tally.counts


def test_overlapping_system_election():
    intents = {1: [1], 2: [3], 3: [3], 4: []}
    out = run_election(4, 3, SeatMode.single(), build_greedy(3, 1), intents, SeededSource(9),
                       transfer_mode="reshare", code_spec=digits(4))
    assert out.tally.counts == {1: 1, 2: 0, 3: 2}


@settings(max_examples=25, deadline=None)
@given(st.permutations([1, 2, 3, 4]), st.integers(0, 1000))
def test_voter_order_does_not_change_tally(order, seed):
    intents = {1: [1], 2: [2], 3: [1], 4: [3]}
    base = run_election(4, 3, SeatMode.single(), build_disjoint(1), intents, SeededSource(seed),
                        code_spec=digits(4))
    shuffled = run_election(4, 3, SeatMode.single(), build_disjoint(1), intents, SeededSource(seed),
                            code_spec=digits(4), voter_order=order)
    assert shuffled.tally.counts == base.tally.counts == expected_tally(intents, 4, 3)
    assert shuffled.transcript.sha256() == base.transcript.sha256()
