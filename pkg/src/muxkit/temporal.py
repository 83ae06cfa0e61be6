"""Time-multiplexed switching: rastered muxes, cyclic delay networks driven
by de Bruijn sequences, and temporal permutation networks.

Occupancies are (mode, bin) grids of heralded photons.  Delay networks pair a
cyclic mode shifter with a bank of fixed delays whose values follow a de
Bruijn (or reduced de Bruijn) sequence, so that any needed word of delays
appears as a contiguous window.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import analytics
from .simkit import Estimate, substream

__all__ = [
    "SpaceTimeOccupancy",
    "DeBruijnSequence",
    "de_bruijn",
    "reduced_de_bruijn",
    "cyclic_windows",
    "DelayNetwork",
    "default_delay_network",
    "DeBruijnRoute",
    "debruijn_mux_route",
    "replay_debruijn_route",
    "non_tetris_success_probability",
    "tetris_success_probability",
    "GatherRoute",
    "spatiotemporal_debruijn",
    "extract_photon_groups",
    "simulate_group_extraction",
    "RasterResult",
    "raster_simulate",
    "PermutationSchedule",
    "temporal_permutation",
    "replay_temporal_permutation",
]


# ---------------------------------------------------------------------------
# occupancy grids


@dataclass(frozen=True)
class SpaceTimeOccupancy:
    modes: int
    bins: int
    grid: tuple[tuple[bool, ...], ...]  # grid[mode][bin]

    def __post_init__(self):
        if self.modes < 1 or self.bins < 1:
            raise ValueError("dims must be positive")
        if len(self.grid) != self.modes or any(len(r) != self.bins for r in self.grid):
            raise ValueError("grid shape mismatch")

    @classmethod
    def from_photons(cls, modes: int, bins: int, cells: Iterable[tuple[int, int]]) -> "SpaceTimeOccupancy":
        grid = [[False] * bins for _ in range(modes)]
        for j, t in cells:
            grid[j][t] = True
        return cls(modes, bins, tuple(tuple(r) for r in grid))

    def photons(self) -> tuple[tuple[int, int], ...]:
        return tuple((j, t) for j in range(self.modes) for t in range(self.bins) if self.grid[j][t])


# ---------------------------------------------------------------------------
# de Bruijn sequences


@dataclass(frozen=True)
class DeBruijnSequence:
    alphabet: int
    word_length: int
    symbols: tuple[int, ...]


_SIZE_GUARD = 10 ** 6


def de_bruijn(k: int, length: int) -> DeBruijnSequence:
    """Lexicographically least de Bruijn sequence over {0..k-1}, words of `length`.

    Standard Lyndon-word concatenation; the cyclic result contains every word
    exactly once.
    """
    _check_db_args(k, length)
    seq: list[int] = []
    a = [0] * (k * length)

    def gen(t: int, p: int) -> None:
        if t > length:
            if length % p == 0:
                seq.extend(a[1: p + 1])
        else:
            a[t] = a[t - p]
            gen(t + 1, p)
            for j in range(a[t - p] + 1, k):
                a[t] = j
                gen(t + 1, t)

    gen(1, 1)
    return DeBruijnSequence(alphabet=k, word_length=length, symbols=tuple(seq))


def _check_db_args(k: int, length: int) -> None:
    if k < 1 or length < 1:
        raise ValueError("need k >= 1 and length >= 1")
    if k ** length > _SIZE_GUARD:
        raise ValueError(f"k**length exceeds guard {_SIZE_GUARD}")


def reduced_de_bruijn(k: int, length: int) -> tuple[int, ...]:
    """Shortest cyclic sequence containing every 0-bearing word exactly once.

    Words that lack the symbol 0 are dropped; an Eulerian circuit over the
    remaining word graph (always balanced) gives length k**L - (k-1)**L.
    Deterministic: edges are consumed smallest symbol first.
    """
    _check_db_args(k, length)
    if k == 1:
        return (0,)

    def has_zero(word: tuple[int, ...]) -> bool:
        return 0 in word

    # vertex = (length-1)-word; edge symbol c completes the word vertex + (c,)
    out_edges: dict[tuple[int, ...], list[int]] = {}
    n_edges = 0
    for v in itertools.product(range(k), repeat=length - 1):
        symbols = [c for c in range(k) if has_zero(v + (c,))]
        if symbols:
            out_edges[v] = symbols  # ascending; consumed from the front
            n_edges += len(symbols)

    start = (0,) * (length - 1)
    # Hierholzer: record an edge's symbol when its frame pops, then reverse
    stack: list[tuple[tuple[int, ...], int | None]] = [(start, None)]
    circuit: list[int] = []
    while stack:
        v, sym = stack[-1]
        avail = out_edges.get(v)
        if avail:
            c = avail.pop(0)
            stack.append((v[1:] + (c,) if length > 1 else v, c))
        else:
            stack.pop()
            if sym is not None:
                circuit.append(sym)
    if len(circuit) != n_edges:
        raise AssertionError("word graph not connected")
    seq = tuple(reversed(circuit))
    assert len(seq) == k ** length - (k - 1) ** length
    return seq


def cyclic_windows(symbols: Sequence[int], length: int) -> list[tuple[int, ...]]:
    """All cyclic windows of the given length, in position order."""
    n = len(symbols)
    ext = list(symbols) + list(symbols[: length - 1])
    return [tuple(ext[i: i + length]) for i in range(n)]


# ---------------------------------------------------------------------------
# de Bruijn delay-network muxing


@dataclass(frozen=True)
class DelayNetwork:
    """Cyclic shifter feeding delay lines whose values tile a cyclic sequence.

    A route witness references a window position w: the photon leaving
    shifter port q receives delay delays[(w + q) % len(delays)].
    """

    modes: int
    bins: int
    delays: tuple[int, ...]

    def word_positions(self) -> dict[tuple[int, ...], int]:
        pos: dict[tuple[int, ...], int] = {}
        for i, w in enumerate(cyclic_windows(self.delays, self.modes)):
            pos.setdefault(w, i)
        return pos


def default_delay_network(modes: int, bins: int) -> DelayNetwork:
    """Reduced-sequence network: alphabet = bins (delays 0..bins-1), words = modes."""
    return DelayNetwork(modes=modes, bins=bins, delays=reduced_de_bruijn(bins, modes))


@dataclass(frozen=True)
class DeBruijnRoute:
    success: bool
    shifts: tuple[int, ...]  # per input bin
    ports: tuple[tuple[int, int] | None, ...]  # port -> chosen (mode, bin)
    window: int
    align_time: int


def _failed(occ: SpaceTimeOccupancy) -> DeBruijnRoute:
    return DeBruijnRoute(False, (0,) * occ.bins, (None,) * occ.modes, -1, -1)


def debruijn_mux_route(occ: SpaceTimeOccupancy, network: DelayNetwork, tetris: bool = False) -> DeBruijnRoute:
    """Find shifter settings aligning one photon per port at a common time.

    Without tetris a single cyclic shift applies to the whole window, so
    success needs every mode occupied.  With tetris the shift may change
    every bin; all modes**bins schedules are tried in lexicographic order.
    """
    m, b = occ.modes, occ.bins
    if network.modes != m or network.bins != b:
        raise ValueError("network dims do not match occupancy")
    bin_masks = [sum(1 << j for j in range(m) if occ.grid[j][t]) for t in range(b)]
    full = (1 << m) - 1

    if not tetris:
        for c in range(m):
            picked = _pick_ports(bin_masks, m, b, (c,) * b)
            if picked is not None:
                return _witness(network, (c,) * b, picked)
        return _failed(occ)

    for schedule in itertools.product(range(m), repeat=b):
        covered = 0
        for t, mask in enumerate(bin_masks):
            covered |= _shift_mask(mask, schedule[t], m)
        if covered == full:
            picked = _pick_ports(bin_masks, m, b, schedule)
            assert picked is not None
            return _witness(network, schedule, picked)
    return _failed(occ)


def _shift_mask(mask: int, c: int, m: int) -> int:
    return ((mask << c) | (mask >> (m - c))) & ((1 << m) - 1) if c else mask


def _pick_ports(bin_masks: list[int], m: int, b: int, schedule: Sequence[int]) -> list[tuple[int, int]] | None:
    """Latest photon reaching each port under the schedule, or None if a gap."""
    picked: list[tuple[int, int] | None] = [None] * m
    for t in range(b):
        mask = bin_masks[t]
        for j in range(m):
            if (mask >> j) & 1:
                q = (j + schedule[t]) % m
                picked[q] = (j, t)  # later bins overwrite: latest wins
    if any(x is None for x in picked):
        return None
    return picked  # type: ignore[return-value]


def _witness(network: DelayNetwork, schedule: tuple[int, ...], picked: list[tuple[int, int]]) -> DeBruijnRoute:
    align = max(t for _, t in picked)
    word = tuple(align - t for _, t in picked)
    pos = network.word_positions().get(word)
    if pos is None:
        raise AssertionError(f"delay word {word} missing from the sequence")
    return DeBruijnRoute(True, schedule, tuple(picked), pos, align)


def replay_debruijn_route(network: DelayNetwork, route: DeBruijnRoute) -> tuple[int, ...]:
    """Arrival time at each port; raises if the witness does not align."""
    if not route.success:
        raise ValueError("cannot replay a failed route")
    m = network.modes
    ell = len(network.delays)
    arrivals = []
    for q, cell in enumerate(route.ports):
        assert cell is not None
        j, t = cell
        if (j + route.shifts[t]) % m != q:
            raise AssertionError("witness photon does not reach its port")
        arrivals.append(t + network.delays[(route.window + q) % ell])
    if len(set(arrivals)) != 1:
        raise AssertionError("witness photons not aligned")
    return tuple(arrivals)


def non_tetris_success_probability(modes: int, bins: int, p: float) -> float:
    """Every mode occupied at least once: [1 - (1-p)**bins]**modes."""
    return analytics.p_mux_single(bins, p) ** modes


def tetris_success_probability(modes: int, bins: int, p: Fraction | float) -> Fraction:
    """Exact success probability with per-bin shifts, by full enumeration.

    Success depends only on the multiset of per-bin mode masks; each multiset
    is solved once by a reachable-union dynamic program equivalent to trying
    all modes**bins schedules.
    """
    p = Fraction(p).limit_denominator(10 ** 9) if not isinstance(p, Fraction) else p
    m, b = modes, bins
    if m * b > 24:
        raise ValueError("enumeration limited to small grids")
    full = (1 << m) - 1

    shift_table = [[_shift_mask(mask, c, m) for c in range(m)] for mask in range(1 << m)]
    memo: dict[tuple[int, ...], bool] = {}

    def solvable(masks: tuple[int, ...]) -> bool:
        key = tuple(sorted(masks))
        if key not in memo:
            reach = {0}
            for mask in key:
                reach = {r | s for r in reach for s in shift_table[mask]}
            memo[key] = full in reach
        return memo[key]

    weight = [p ** bin(mask).count("1") * (1 - p) ** (m - bin(mask).count("1")) for mask in range(1 << m)]
    total = Fraction(0)
    for masks in itertools.product(range(1 << m), repeat=b):
        if solvable(masks):
            w = Fraction(1)
            for mask in masks:
                w *= weight[mask]
            total += w
    return total


# ---------------------------------------------------------------------------
# spatio-temporal gathering (cyclic shift + bounded crossings + bounded delays)


@dataclass(frozen=True)
class GatherRoute:
    photons: tuple[tuple[int, int], ...]  # selected (mode, bin), mode-ascending
    block_start: int
    displacements: tuple[int, ...]
    delays: tuple[int, ...]
    align_time: int
    output_shift: int  # final cyclic shift moving the block to modes 0..n-1


def spatiotemporal_debruijn(
    modes: int,
    group_size: int,
    occ: SpaceTimeOccupancy,
    max_delay: int = 2,
    max_crossing: int = 2,
) -> GatherRoute | None:
    """First group of photons gatherable to contiguous modes and one time.

    Scans alignment times ascending; a group needs photons on group_size
    distinct modes within the trailing delay window, movable order-preserving
    onto a contiguous block with per-photon displacement <= max_crossing.
    """
    if not group_size < modes:
        raise ValueError("need group_size < modes")
    consumed: set[tuple[int, int]] = set()
    return _find_group(occ, group_size, max_delay, max_crossing, consumed, start_time=0)


def _find_group(
    occ: SpaceTimeOccupancy,
    n: int,
    max_delay: int,
    max_crossing: int,
    consumed: set[tuple[int, int]],
    start_time: int,
) -> GatherRoute | None:
    m = occ.modes
    for align in range(start_time, occ.bins):
        lo = max(0, align - max_delay)
        # latest unconsumed photon per mode inside the window
        latest: dict[int, int] = {}
        for j in range(m):
            for t in range(align, lo - 1, -1):
                if occ.grid[j][t] and (j, t) not in consumed:
                    latest[j] = t
                    break
        if len(latest) < n:
            continue
        avail = sorted(latest)
        for s in range(m - n + 1):
            chosen = _greedy_block_match(avail, s, n, max_crossing)
            if chosen is not None:
                photons = tuple((j, latest[j]) for j in chosen)
                return GatherRoute(
                    photons=photons,
                    block_start=s,
                    displacements=tuple((s + i) - j for i, j in enumerate(chosen)),
                    delays=tuple(align - t for _, t in photons),
                    align_time=align,
                    output_shift=(-s) % m,
                )
    return None


def _greedy_block_match(avail: list[int], s: int, n: int, max_crossing: int) -> list[int] | None:
    """Order-preserving match of modes onto slots s..s+n-1 within the bound."""
    chosen: list[int] = []
    idx = 0
    for i in range(n):
        slot = s + i
        while idx < len(avail) and avail[idx] < slot - max_crossing:
            idx += 1
        if idx == len(avail) or abs(avail[idx] - slot) > max_crossing:
            return None
        chosen.append(avail[idx])
        idx += 1
    return chosen


def extract_photon_groups(
    modes: int,
    group_size: int,
    occ: SpaceTimeOccupancy,
    max_delay: int = 2,
    max_crossing: int = 2,
    max_groups: int | None = None,
) -> list[GatherRoute]:
    """Greedy repeated extraction; each group consumes its photons."""
    consumed: set[tuple[int, int]] = set()
    groups: list[GatherRoute] = []
    start = 0
    while max_groups is None or len(groups) < max_groups:
        route = _find_group(occ, group_size, max_delay, max_crossing, consumed, start)
        if route is None:
            break
        groups.append(route)
        consumed.update(route.photons)
        start = route.align_time  # same window may hold another group
    return groups


def simulate_group_extraction(
    modes: int,
    group_size: int,
    bins: int,
    p: float,
    trials: int,
    seed: int,
    max_delay: int = 2,
    max_crossing: int = 2,
    max_groups: int = 4,
) -> dict[int, Estimate]:
    """P(at least k groups) for k = 1..max_groups over random occupancies."""
    if trials < 2:
        raise ValueError("trials must be >= 2")
    hits = np.zeros((max_groups, trials), dtype=np.float64)
    for trial in range(trials):
        gen = substream(seed, trial)
        grid = gen.random((modes, bins)) < p
        occ = SpaceTimeOccupancy(modes, bins, tuple(tuple(bool(x) for x in row) for row in grid))
        found = len(extract_photon_groups(modes, group_size, occ, max_delay, max_crossing, max_groups))
        hits[:found, trial] = 1.0
    out = {}
    for k in range(1, max_groups + 1):
        row = hits[k - 1]
        mean = float(row.mean())
        std = float(row.std(ddof=1)) if trials > 1 else float("inf")
        out[k] = Estimate(mean=mean, stderr=std / math.sqrt(trials), trials=trials, seed=seed)
    return out


# ---------------------------------------------------------------------------
# rastered muxes


RASTER_GROUP_STEPS = {"one-mux": 4, "two-mux": 2}
_RASTER_ALIASES = {"i": "one-mux", "ii": "two-mux"}


@dataclass(frozen=True)
class RasterResult:
    groups_per_period: Estimate
    yield_per_photon: Estimate
    completion_offsets: tuple[int, ...]  # completions by step offset mod 4


def raster_simulate(
    strategy: str,
    n_sources: int,
    p: float,
    enhanced: bool,
    trials: int,
    seed: int,
    steps: int = 96,
) -> RasterResult:
    """Monte-Carlo raster over `steps` source firings (a period is 4 steps).

    one-mux: a single n-to-1 mux fires every step; a group is 4 consecutive
    successes.  two-mux: two n/2-to-1 muxes fire together; a group is 2
    consecutive both-fire steps.  Without enhancement only period-aligned
    blocks count; with enhancement a failed step restarts the group at the
    next step.  Both counts are greedy-disjoint, so enhancement can only add
    groups for any fixed outcome stream.
    """
    strategy = _RASTER_ALIASES.get(strategy, strategy)
    run = RASTER_GROUP_STEPS[strategy]
    if steps % 4:
        raise ValueError("steps must be a multiple of the 4-step period")
    if trials < 2:
        raise ValueError("trials must be >= 2")
    if strategy == "one-mux":
        q = analytics.p_mux_single(n_sources, p)
        draws = steps
    else:
        if n_sources % 2:
            raise ValueError("two-mux needs even n_sources")
        q = analytics.p_mux_single(n_sources // 2, p)
        draws = 2 * steps

    ok = np.empty((trials, steps), dtype=bool)
    for trial in range(trials):
        u = substream(seed, trial).random(draws)
        if strategy == "one-mux":
            ok[trial] = u < q
        else:
            ok[trial] = (u.reshape(steps, 2) < q).all(axis=1)

    offsets = np.zeros(4, dtype=np.int64)
    if enhanced:
        counts = np.zeros(trials, dtype=np.int64)
        streak = np.zeros(trials, dtype=np.int64)
        for t in range(steps):
            streak = np.where(ok[:, t], streak + 1, 0)
            done = streak == run
            counts += done
            offsets[t % 4] += int(done.sum())
            streak[done] = 0
    else:
        blocks = ok.reshape(trials, steps // run, run).all(axis=2)
        counts = blocks.sum(axis=1)
        per_block = blocks.sum(axis=0)
        for k, c in enumerate(per_block):
            offsets[(k * run + run - 1) % 4] += int(c)

    periods = steps // 4
    per_period = counts / periods
    mean = float(per_period.mean())
    std = float(per_period.std(ddof=1)) if trials > 1 else float("inf")
    groups = Estimate(mean=mean, stderr=std / math.sqrt(trials), trials=trials, seed=seed)
    scale = 1.0 / (n_sources * p) if p > 0 else 0.0
    yield_ = Estimate(mean=mean * scale, stderr=groups.stderr * scale, trials=trials, seed=seed)
    return RasterResult(groups, yield_, tuple(int(x) for x in offsets))


# ---------------------------------------------------------------------------
# temporal permutation networks


@dataclass(frozen=True)
class PermutationSchedule:
    """Shift settings for a shifter -> delay bank -> shifter time network.

    Photons arrive on line 0, one per bin; `first_shifts[t]` routes the bin-t
    photon into its delay line, `second_shifts[t]` routes the line arriving
    at bin t back out.  sort-to-top uses spatial outputs (one port per rank);
    arbitrary uses the single line 0 with a fixed output bin window.
    """

    variant: str
    n_inputs: int
    size: int
    delay_values: tuple[int, ...]
    inputs: tuple[int, ...]  # occupied input bins, ascending
    targets: tuple[int, ...]  # targets[r]: output slot of inputs[r]
    first_shifts: dict[int, int]
    second_shifts: dict[int, int]

    def output_bin(self, slot: int) -> int:
        return self.n_inputs - 1 + slot


def temporal_permutation(n_inputs: int, perm: Sequence[int], variant: str = "arbitrary") -> PermutationSchedule:
    """Schedule realizing a rearrangement of a length-R input pulse train.

    arbitrary: `perm` is a permutation of range(R); input i leaves in output
    slot perm[i] (bin R-1+perm[i]); needs a size 2R-1 shifter pair with
    delays 0..2R-2, and the set of output bins never depends on perm.
    sort-to-top: `perm` lists the occupied inputs; photon of rank r exits on
    port r at bin R-1+r; a size R network with delays 0..R-1 suffices.
    """
    r_n = n_inputs
    if r_n < 1:
        raise ValueError("n_inputs must be >= 1")
    if variant == "arbitrary":
        if sorted(perm) != list(range(r_n)):
            raise ValueError("perm must be a permutation of range(n_inputs)")
        size = 2 * r_n - 1
        inputs = tuple(range(r_n))
        targets = tuple(perm)
    elif variant == "sort-to-top":
        inputs = tuple(perm)
        if list(inputs) != sorted(set(inputs)) or any(not 0 <= i < r_n for i in inputs):
            raise ValueError("occupied inputs must be ascending and in range")
        size = r_n
        targets = tuple(range(len(inputs)))
    else:
        raise ValueError(f"unknown variant {variant!r}")

    first: dict[int, int] = {}
    second: dict[int, int] = {}
    for i, slot in zip(inputs, targets):
        line = slot + r_n - 1 - i
        if not 0 <= line < size:
            raise AssertionError("delay demand outside the bank")
        first[i] = line  # shift sending line 0 -> line (cyclic: by +line)
        second[r_n - 1 + slot] = _second_shift(variant, line, slot, size)
    return PermutationSchedule(
        variant=variant,
        n_inputs=r_n,
        size=size,
        delay_values=tuple(range(size)),
        inputs=inputs,
        targets=targets,
        first_shifts=first,
        second_shifts=second,
    )


def _second_shift(variant: str, line: int, slot: int, size: int) -> int:
    if variant == "arbitrary":
        return (-line) % size  # back to line 0
    return (slot - line) % size  # to output port = rank


def replay_temporal_permutation(schedule: PermutationSchedule) -> dict[int, tuple[int, int]]:
    """Discrete-event replay: input index -> (output port, output bin)."""
    size = schedule.size
    in_flight: dict[int, list[tuple[int, int]]] = {}  # arrival bin -> (line, input)
    for i in schedule.inputs:
        shift = schedule.first_shifts[i]
        line = (0 + shift) % size
        delay = schedule.delay_values[line]
        in_flight.setdefault(i + delay, []).append((line, i))

    out: dict[int, tuple[int, int]] = {}
    for bin_, arrivals in sorted(in_flight.items()):
        if len(arrivals) != 1:
            raise AssertionError(f"collision at bin {bin_}")
        line, i = arrivals[0]
        shift = schedule.second_shifts.get(bin_)
        if shift is None:
            raise AssertionError(f"no setting for arrival bin {bin_}")
        out[i] = ((line + shift) % size, bin_)
    return out
