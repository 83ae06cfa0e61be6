"""Time multiplexing: sequences, delay routing, rastering, permutations."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from muxkit import analytics, temporal
from muxkit.simkit import substream

TETRIS_4X4_QUARTER = Fraction(2504542567, 4294967296)  # exact enumeration


def test_de_bruijn_frozen_sequences():
    assert temporal.de_bruijn(2, 1).symbols == (0, 1)
    assert temporal.de_bruijn(2, 3).symbols == (0, 0, 0, 1, 0, 1, 1, 1)
    assert temporal.de_bruijn(3, 2).symbols == (0, 0, 1, 0, 2, 1, 1, 2, 2)


def test_de_bruijn_window_property():
    for k, length in [(2, 1), (2, 3), (2, 5), (3, 2), (3, 3), (4, 2), (5, 2), (6, 1)]:
        seq = temporal.de_bruijn(k, length)
        assert len(seq.symbols) == k ** length
        wins = temporal.cyclic_windows(seq.symbols, length)
        assert len(set(wins)) == k ** length
        assert set(wins) == set(itertools.product(range(k), repeat=length))


def test_de_bruijn_guards():
    with pytest.raises(ValueError):
        temporal.de_bruijn(0, 2)
    with pytest.raises(ValueError):
        temporal.de_bruijn(2, 0)
    with pytest.raises(ValueError):
        temporal.de_bruijn(10, 7)  # 10^7 over the size guard


def test_reduced_de_bruijn():
    assert temporal.reduced_de_bruijn(2, 2) == (0, 1, 0)
    assert len(temporal.reduced_de_bruijn(4, 4)) == 4 ** 4 - 3 ** 4 == 175
    assert temporal.reduced_de_bruijn(1, 5) == (0,)
    for k, length in [(2, 2), (2, 4), (3, 2), (3, 3), (4, 3), (5, 2)]:
        seq = temporal.reduced_de_bruijn(k, length)
        assert len(seq) == k ** length - (k - 1) ** length
        wins = temporal.cyclic_windows(seq, length)
        with_zero = [w for w in set(wins) if 0 in w]
        # every window holds a 0, each 0-word appears exactly once
        assert len(wins) == len(set(wins)) == len(with_zero)
        expect = {w for w in itertools.product(range(k), repeat=length) if 0 in w}
        assert set(wins) == expect


def _occ(grid):
    rows = tuple(tuple(bool(x) for x in row) for row in grid)
    return temporal.SpaceTimeOccupancy(len(rows), len(rows[0]), rows)


def test_debruijn_route_trivial_cases():
    net = temporal.default_delay_network(4, 4)
    everything_first_bin = _occ([[1, 0, 0, 0]] * 4)
    route = temporal.debruijn_mux_route(everything_first_bin, net)
    assert route.success
    arrivals = temporal.replay_debruijn_route(net, route)
    assert len(set(arrivals)) == 1  # all aligned to one bin
    empty = _occ([[0] * 4] * 4)
    assert not temporal.debruijn_mux_route(empty, net).success
    full = _occ([[1] * 4] * 4)
    assert temporal.debruijn_mux_route(full, net).success


def test_debruijn_route_replay_on_random_occupancies():
    net = temporal.default_delay_network(4, 4)
    hits = 0
    for trial in range(400):
        grid = substream(77, trial).random((4, 4)) < 0.35
        occ = _occ(grid)
        route = temporal.debruijn_mux_route(occ, net)
        if not route.success:
            continue
        hits += 1
        assert len(route.ports) == 4
        modes = [m for m, _ in route.ports]
        assert sorted(modes) == [0, 1, 2, 3]
        for m, t in route.ports:
            assert occ.grid[m][t]
        arrivals = temporal.replay_debruijn_route(net, route)
        assert len(set(arrivals)) == 1
    assert hits > 50


def test_non_tetris_probability_matches_simulation():
    p = 0.25
    net = temporal.default_delay_network(4, 4)
    expected = temporal.non_tetris_success_probability(4, 4, p)
    assert expected == pytest.approx(float(Fraction(175, 256) ** 4), abs=1e-12)
    trials = 4000
    wins = 0
    for trial in range(trials):
        grid = substream(9, trial).random((4, 4)) < p
        wins += temporal.debruijn_mux_route(_occ(grid), net).success
    se = math.sqrt(expected * (1 - expected) / trials)
    assert abs(wins / trials - expected) <= 3 * se


def test_tetris_probability_exact_and_banded():
    got = temporal.tetris_success_probability(4, 4, Fraction(1, 4))
    assert got == TETRIS_4X4_QUARTER
    assert abs(float(got) - 0.56) <= 0.03
    assert float(got) > temporal.non_tetris_success_probability(4, 4, 0.25)
    with pytest.raises(ValueError):
        temporal.tetris_success_probability(5, 5, 0.25)


def test_tetris_dominates_non_tetris_pathwise():
    net = temporal.default_delay_network(4, 4)
    flips = 0
    for trial in range(300):
        grid = substream(13, trial).random((4, 4)) < 0.3
        occ = _occ(grid)
        plain = temporal.debruijn_mux_route(occ, net, tetris=False)
        shifty = temporal.debruijn_mux_route(occ, net, tetris=True)
        if plain.success:
            assert shifty.success
        if shifty.success and not plain.success:
            flips += 1
        if shifty.success:
            arrivals = temporal.replay_debruijn_route(net, shifty)
            assert len(set(arrivals)) == 1
    assert flips > 0  # the per-bin shifts must rescue some occupancies


def test_spatiotemporal_identity_case():
    # photons already contiguous and aligned need no movement at all
    occ = _occ([[0, 1], [0, 1], [0, 1], [0, 0], [0, 0]])
    route = temporal.spatiotemporal_debruijn(5, 3, occ)
    assert route is not None
    assert route.photons == ((0, 1), (1, 1), (2, 1))
    assert route.block_start == 0
    assert route.displacements == (0, 0, 0)
    assert route.delays == (0, 0, 0)
    assert route.output_shift == 0
    with pytest.raises(ValueError):
        temporal.spatiotemporal_debruijn(4, 4, occ)


def test_spatiotemporal_uses_delays_and_crossings():
    occ = _occ([
        [1, 0, 0],
        [0, 0, 0],
        [0, 1, 0],
        [0, 0, 0],
    ])
    route = temporal.spatiotemporal_debruijn(4, 2, occ, max_delay=2, max_crossing=2)
    assert route is not None
    # both photons meet at the later bin, one displaced into the block
    assert route.align_time == 1
    assert sorted(route.photons) == [(0, 0), (2, 1)]
    assert max(route.delays) >= 1
    assert max(abs(d) for d in route.displacements) >= 1


def test_extract_photon_groups_consumes():
    occ = _occ([
        [1, 1],
        [1, 1],
        [1, 1],
        [1, 1],
    ])
    groups = temporal.extract_photon_groups(4, 3, occ)
    assert len(groups) == 2
    used = [g.photons for g in groups]
    assert len({p for ph in used for p in ph}) == 6  # no photon reused
    limited = temporal.extract_photon_groups(4, 3, occ, max_groups=1)
    assert len(limited) == 1


def test_simulate_group_extraction():
    out = temporal.simulate_group_extraction(6, 4, 4, 0.5, trials=400, seed=21)
    assert sorted(out) == [1, 2, 3, 4]
    # P(at least k groups) decreases in k
    means = [out[k].mean for k in (1, 2, 3, 4)]
    assert all(a >= b for a, b in zip(means, means[1:]))
    assert all(0.0 <= m <= 1.0 for m in means)
    again = temporal.simulate_group_extraction(6, 4, 4, 0.5, trials=400, seed=21)
    assert [out[k].mean for k in out] == [again[k].mean for k in again]
    with pytest.raises(ValueError):
        temporal.simulate_group_extraction(6, 4, 4, 0.5, trials=1, seed=21)


def test_raster_simulation_matches_rate_formula():
    # without enhancement the group count is the closed-form block rate
    for strategy, n in (("one-mux", 16), ("two-mux", 16)):
        for p in (0.1, 0.2):
            res = temporal.raster_simulate(strategy, n, p, enhanced=False, trials=3000, seed=4)
            expected = analytics.raster_rate(strategy, n, p)
            se = max(res.groups_per_period.stderr, 1e-9)
            assert abs(res.groups_per_period.mean - expected) <= 3.5 * se, (strategy, p)
            # yield definition: groups * group_size / photons per period
            assert res.yield_per_photon.mean == pytest.approx(
                res.groups_per_period.mean / (n * p), rel=1e-12
            )


def test_raster_enhancement_dominates_pathwise():
    for strategy in ("one-mux", "two-mux"):
        base = temporal.raster_simulate(strategy, 24, 0.12, enhanced=False, trials=800, seed=31)
        plus = temporal.raster_simulate(strategy, 24, 0.12, enhanced=True, trials=800, seed=31)
        assert plus.groups_per_period.mean >= base.groups_per_period.mean
        # regular rastering only ever finishes on period-aligned offsets,
        # enhanced rastering spreads completions over all offsets
        aligned = (3,) if strategy == "one-mux" else (1, 3)
        assert all(
            c == 0 for i, c in enumerate(base.completion_offsets) if i not in aligned
        )
        assert sum(plus.completion_offsets) >= sum(base.completion_offsets)


def test_raster_aliases_and_guards():
    a = temporal.raster_simulate("i", 16, 0.1, enhanced=False, trials=50, seed=1)
    b = temporal.raster_simulate("one-mux", 16, 0.1, enhanced=False, trials=50, seed=1)
    assert a == b
    with pytest.raises(ValueError):
        temporal.raster_simulate("one-mux", 16, 0.1, enhanced=False, trials=50, seed=1, steps=10)
    with pytest.raises(ValueError):
        temporal.raster_simulate("one-mux", 16, 0.1, enhanced=False, trials=1, seed=1)
    with pytest.raises(ValueError):
        temporal.raster_simulate("two-mux", 15, 0.1, enhanced=False, trials=50, seed=1)
    with pytest.raises(KeyError):
        temporal.raster_simulate("three-mux", 16, 0.1, enhanced=False, trials=50, seed=1)


def test_temporal_permutation_replays_every_small_perm():
    for r in range(1, 6):
        for perm in itertools.permutations(range(r)):
            sched = temporal.temporal_permutation(r, perm)
            out = temporal.replay_temporal_permutation(sched)
            for i in range(r):
                port, bin_ = out[i]
                assert port == 0  # arbitrary variant re-merges onto line 0
                assert bin_ == r - 1 + perm[i]
            assert sched.size == 2 * r - 1
            assert sched.output_bin(perm[0]) == r - 1 + perm[0]


def test_temporal_permutation_timing_is_permutation_independent():
    r = 5
    bins_seen = set()
    for perm in itertools.permutations(range(r)):
        sched = temporal.temporal_permutation(r, perm)
        out = temporal.replay_temporal_permutation(sched)
        bins_seen.add(tuple(sorted(b for _, b in out.values())))
    assert bins_seen == {tuple(range(r - 1, 2 * r - 1))}


def test_temporal_permutation_sort_to_top():
    occupied = (0, 2, 3)
    sched = temporal.temporal_permutation(4, occupied, variant="sort-to-top")
    assert sched.size == 4
    out = temporal.replay_temporal_permutation(sched)
    for rank, i in enumerate(occupied):
        port, bin_ = out[i]
        assert port == rank
        assert bin_ == 4 - 1 + rank
    with pytest.raises(ValueError):
        temporal.temporal_permutation(4, (2, 0), variant="sort-to-top")
    with pytest.raises(ValueError):
        temporal.temporal_permutation(4, (0, 1, 1), variant="arbitrary")
    with pytest.raises(ValueError):
        temporal.temporal_permutation(4, (0, 1, 2, 3), variant="bogus")
