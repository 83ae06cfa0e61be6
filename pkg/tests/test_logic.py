"""Feedforward logic: priority encoding and wildcard-reduced truth tables."""

import itertools
import math

import pytest

from muxkit import logic
from muxkit.simkit import substream


def test_priority_encode():
    assert logic.priority_encode([]) is None
    assert logic.priority_encode([0, 0, 0]) is None
    assert logic.priority_encode([1, 0, 1]) == 0
    assert logic.priority_encode([0, 0, 1, 1, 0]) == 2
    assert logic.priority_encode([False, True]) == 1


def test_row_counts_are_binomial():
    for width in range(1, 11):
        for n in range(0, width + 1):
            table = logic.wildcard_reduce(width, n)
            assert len(table.rows) == math.comb(width, n), (width, n)
    assert len(logic.wildcard_reduce(12, 4).rows) == 495


def test_every_input_matches_at_most_one_row():
    table = logic.wildcard_reduce(8, 3)
    for bits in itertools.product((0, 1), repeat=8):
        hits = table.match_rows(bits)
        if sum(bits) >= 3:
            assert len(hits) == 1
        else:
            assert hits == []
            assert table.lookup(bits) == table.default_outputs


def test_matched_row_keeps_first_n_and_dumps_the_rest():
    table = logic.wildcard_reduce(8, 3)
    for bits in itertools.product((0, 1), repeat=8):
        if sum(bits) < 3:
            continue
        keep = [i for i, b in enumerate(bits) if b][:3]
        dump = table.lookup(bits)
        assert len(dump) == 8
        assert [i for i, d in enumerate(dump) if d == 0] == keep


def test_pattern_shape():
    for width, n in [(6, 2), (7, 4), (9, 3)]:
        table = logic.wildcard_reduce(width, n)
        for pattern, _ in table.rows:
            assert len(pattern) == width
            assert pattern.count("1") == n
            head = pattern.rstrip("*")
            assert set(pattern[len(head):]) <= {"*"}
            assert head.endswith("1") or n == 0
            assert "*" not in head  # wildcards only after the last firing port


def test_outputs_for_prepends_switch_settings():
    table = logic.wildcard_reduce(5, 2, outputs_for=lambda base: [logic.priority_encode(base)])
    out = table.lookup((0, 1, 0, 1, 1))
    assert out[0] == 1  # switch setting from the callback
    assert out[1:] == (1, 0, 1, 0, 1)  # dump everything but ports 1 and 3
    assert table.default_outputs == (0, 1, 1, 1, 1, 1)


def test_lookup_flags_conflicts():
    bad = logic.TruthTable(width=3, rows=(("1**", (1,)), ("*1*", (2,))), default_outputs=(0,))
    with pytest.raises(ValueError):
        bad.lookup((1, 1, 0))
    agree = logic.TruthTable(width=3, rows=(("1**", (1,)), ("*1*", (1,))), default_outputs=(0,))
    assert agree.lookup((1, 1, 0)) == (1,)
    with pytest.raises(ValueError):
        logic.TruthTable(width=3, rows=(("1*", (1,)),), default_outputs=(0,))
    with pytest.raises(ValueError):
        logic.TruthTable(width=3, rows=(("12*", (1,)),), default_outputs=(0,))


def test_zero_photon_table_matches_everything():
    table = logic.wildcard_reduce(4, 0)
    assert len(table.rows) == 1
    assert table.rows[0][0] == "****"
    for bits in itertools.product((0, 1), repeat=4):
        assert table.lookup(bits) == (1, 1, 1, 1)
    with pytest.raises(ValueError):
        logic.wildcard_reduce(4, 5)


def test_csv_golden():
    table = logic.wildcard_reduce(3, 2)
    assert table.to_csv() == (
        "pattern,out0,out1,out2\n"
        "11*,0,0,1\n"
        "101,0,1,0\n"
        "011,1,0,0\n"
        "***,1,1,1\n"
    )


def test_lookup_agrees_with_direct_rule_on_random_inputs():
    table = logic.wildcard_reduce(12, 4)
    rng = substream(20260814, 3)
    for _ in range(300):
        bits = tuple(int(b) for b in rng.random(12) < 0.4)
        ones = [i for i, b in enumerate(bits) if b]
        if len(ones) >= 4:
            keep = set(ones[:4])
            assert table.lookup(bits) == tuple(0 if i in keep else 1 for i in range(12))
        else:
            assert table.lookup(bits) == (1,) * 12
