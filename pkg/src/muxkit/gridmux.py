"""Two-layer grid multiplexer: output rows drawing from shared input columns.

Sources sit on a grid of cells.  Each column is one first-layer switch whose
group of cyclic permutations moves photons between the column's cells; each
row hosts one second-layer n-to-1 switch delivering a single output.  Rows
are grouped, and a group succeeds when all of its rows receive a photon.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import analytics
from .simkit import Estimate, substream

__all__ = [
    "GridMuxConfig",
    "default_config",
    "config_to_json",
    "config_from_json",
    "RoutingOutcome",
    "route",
    "simulate_grid_yield",
    "GridYieldPoint",
    "bound_curve",
    "naive_curve",
]


@dataclass(frozen=True)
class GridMuxConfig:
    columns: tuple[int, ...]  # first-layer switch sizes, one per column
    rows: tuple[tuple[int, int], ...]  # (second-layer size, group id) per row
    grid: tuple[tuple[bool, ...], ...]  # marks[row][column]
    group_size: int
    generators: int

    def __post_init__(self):
        n_rows, n_cols = len(self.rows), len(self.columns)
        if len(self.grid) != n_rows or any(len(r) != n_cols for r in self.grid):
            raise ValueError("grid shape mismatch")
        if self.group_size * self.generators != n_rows:
            raise ValueError("rows must form generators groups of group_size")
        for i, (size, gid) in enumerate(self.rows):
            if gid != i // self.group_size:
                raise ValueError("rows must be grouped consecutively")
            if sum(self.grid[i]) != size:
                raise ValueError(f"row {i} size {size} != marked cells")
        for c, size in enumerate(self.columns):
            if sum(self.grid[r][c] for r in range(n_rows)) != size:
                raise ValueError(f"column {c} size {size} != marked cells")

    @property
    def n_cells(self) -> int:
        return sum(self.columns)

    def column_rows(self, c: int) -> tuple[int, ...]:
        """Rows of column c's cells, ascending; index = position in the switch."""
        return tuple(r for r in range(len(self.rows)) if self.grid[r][c])

    def row_columns(self, r: int) -> tuple[int, ...]:
        return tuple(c for c in range(len(self.columns)) if self.grid[r][c])


def default_config() -> GridMuxConfig:
    """256 cells: 16 columns of 16, 20 rows in 5 groups of 4.

    Only the counts are pinned down (row sizes drawn from {4, 8, 12, 16},
    16 cells per column); cells are assigned to columns by a cyclic sweep,
    which balances every column exactly.
    """
    sizes = [16, 16, 12, 8] * 4 + [16, 16, 12, 4]
    assert sum(sizes) == 256
    n_cols = 16
    grid = [[False] * n_cols for _ in sizes]
    ptr = 0
    for r, s in enumerate(sizes):
        for _ in range(s):
            grid[r][ptr % n_cols] = True
            ptr += 1
    return GridMuxConfig(
        columns=(16,) * n_cols,
        rows=tuple((s, i // 4) for i, s in enumerate(sizes)),
        grid=tuple(tuple(row) for row in grid),
        group_size=4,
        generators=5,
    )


def config_to_json(config: GridMuxConfig) -> str:
    doc = {
        "columns": list(config.columns),
        "rows": [list(r) for r in config.rows],
        "grid": [[int(x) for x in row] for row in config.grid],
        "group_size": config.group_size,
        "generators": config.generators,
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def config_from_json(text: str) -> GridMuxConfig:
    doc = json.loads(text)
    return GridMuxConfig(
        columns=tuple(doc["columns"]),
        rows=tuple((int(a), int(b)) for a, b in doc["rows"]),
        grid=tuple(tuple(bool(x) for x in row) for row in doc["grid"]),
        group_size=int(doc["group_size"]),
        generators=int(doc["generators"]),
    )


# ---------------------------------------------------------------------------
# routing


def _radices(factors: Sequence[int]) -> tuple[int, ...]:
    out = []
    acc = 1
    for f in reversed(factors):
        out.append(acc)
        acc *= f
    return tuple(reversed(out))


def _digits(index: int, factors: Sequence[int], radices: Sequence[int]) -> tuple[int, ...]:
    return tuple((index // r) % f for f, r in zip(factors, radices))


def _apply_setting(pos: int, setting: tuple[int, ...], factors: Sequence[int], radices: Sequence[int]) -> int:
    digs = _digits(pos, factors, radices)
    return sum(((d + s) % f) * r for d, s, f, r in zip(digs, setting, factors, radices))


def _setting_between(src: int, dst: int, factors: Sequence[int], radices: Sequence[int]) -> tuple[int, ...]:
    a = _digits(src, factors, radices)
    b = _digits(dst, factors, radices)
    return tuple((y - x) % f for x, y, f in zip(a, b, factors))


def _default_factors(size: int) -> tuple[int, ...]:
    if size & (size - 1) == 0 and size > 0:
        return (2,) * (size.bit_length() - 1)
    # fall back to a single cyclic stage for non powers of two
    return (size,)


@dataclass(frozen=True)
class RoutingOutcome:
    group_success: tuple[bool, ...]
    column_settings: dict[int, tuple[int, ...]]  # locked column -> shift digits
    row_sources: dict[int, int]  # filled row -> selected column


def route(
    config: GridMuxConfig,
    occupancy: Sequence[Sequence[bool]],
    column_group_type: Sequence[int] | None = None,
) -> RoutingOutcome:
    """Greedy group-by-group lock/release routing.

    For each group in order and each of its rows, columns are scanned by
    ascending index: a locked column serves the row if its frozen permutation
    drops a photon on the row's cell; an unlocked column with any photon is
    claimed, its shift chosen to move its lowest occupied cell into the row.
    A group that cannot fill some row releases every column it claimed.
    """
    n_rows = len(config.rows)
    for r in range(n_rows):
        for c in range(len(config.columns)):
            if occupancy[r][c] and not config.grid[r][c]:
                raise ValueError(f"occupancy on unmarked cell ({r}, {c})")

    factors = tuple(column_group_type) if column_group_type is not None else None
    col_meta = []
    for c, size in enumerate(config.columns):
        f = factors if factors is not None else _default_factors(size)
        if math.prod(f) != size:
            raise ValueError("column group order must equal column size")
        rows_of = config.column_rows(c)
        occ_positions = [i for i, r in enumerate(rows_of) if occupancy[r][c]]
        col_meta.append((f, _radices(f), rows_of, {r: i for i, r in enumerate(rows_of)}, occ_positions))

    locked: dict[int, tuple[int, ...]] = {}
    row_sources: dict[int, int] = {}
    success = []
    for g in range(config.generators):
        group_rows = range(g * config.group_size, (g + 1) * config.group_size)
        claimed: dict[int, tuple[int, ...]] = {}
        filled: dict[int, int] = {}
        ok = True
        for r in group_rows:
            chosen = None
            for c in config.row_columns(r):
                f, rad, rows_of, pos_of, occ_positions = col_meta[c]
                target = pos_of[r]
                setting = claimed.get(c, locked.get(c))
                if setting is not None:
                    src = _apply_setting(target, tuple(-s % ff for s, ff in zip(setting, f)), f, rad)
                    if occupancy[rows_of[src]][c]:
                        chosen = (c, None)
                        break
                elif occ_positions:
                    chosen = (c, _setting_between(occ_positions[0], target, f, rad))
                    break
            if chosen is None:
                ok = False
                break
            c, setting = chosen
            if setting is not None:
                claimed[c] = setting
            filled[r] = c
        success.append(ok)
        if ok:
            locked.update(claimed)
            row_sources.update(filled)
    return RoutingOutcome(tuple(success), locked, row_sources)


# ---------------------------------------------------------------------------
# yield simulation


@dataclass(frozen=True)
class GridYieldPoint:
    p: float
    estimate: Estimate
    bound: float
    naive: float


def simulate_grid_yield(
    config: GridMuxConfig,
    p: float,
    trials: int,
    seed: int,
    column_group_type: Sequence[int] | None = None,
) -> GridYieldPoint:
    """Per-trial yield (group_size x successes / photons), averaged.

    Empty trials contribute zero.  Cells are sampled in row-major order over
    the marked cells so results are reproducible per (seed, trial).
    """
    if trials < 2:
        raise ValueError("trials must be >= 2")
    marked = [(r, c) for r in range(len(config.rows)) for c in range(len(config.columns)) if config.grid[r][c]]
    n_rows, n_cols = len(config.rows), len(config.columns)
    vals = np.empty(trials, dtype=np.float64)
    for trial in range(trials):
        hits = substream(seed, trial).random(len(marked)) < p
        occupancy = [[False] * n_cols for _ in range(n_rows)]
        n_photons = 0
        for (r, c), h in zip(marked, hits):
            if h:
                occupancy[r][c] = True
                n_photons += 1
        if n_photons == 0:
            vals[trial] = 0.0
            continue
        outcome = route(config, occupancy, column_group_type)
        vals[trial] = config.group_size * sum(outcome.group_success) / n_photons
    mean = float(vals.mean())
    std = float(vals.std(ddof=1)) if trials > 1 else float("inf")
    est = Estimate(mean=mean, stderr=std / math.sqrt(trials), trials=trials, seed=seed)
    return GridYieldPoint(p=p, estimate=est, bound=bound_curve(config, p), naive=naive_curve(config, p))


def bound_curve(config: GridMuxConfig, p: float) -> float:
    """Sharing bound: all photons in one bank feeding every generator."""
    lam = config.n_cells * p
    return analytics.yield_multi_generator(lam, config.group_size, config.generators, sharing=True)


def naive_curve(config: GridMuxConfig, p: float) -> float:
    """One generator fed by group_size independent even muxes over the cells."""
    n = config.n_cells
    m = config.group_size
    if p <= 0:
        return 0.0
    return m * analytics.p_mux_single(n // m, p) ** m / (n * p)
