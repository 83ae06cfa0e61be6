"""Feedforward routing logic: priority encoding and wildcard-reduced tables.

Heralding detectors feed a lookup table that picks switch settings and dumps
excess photons.  Listing every input pattern needs 2^B rows; since only the
first n heralds matter, all zeros after the final significant one can be
wildcarded, cutting the table to C(B, n) rows.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

__all__ = ["TruthTable", "priority_encode", "wildcard_reduce"]


def priority_encode(bits: Sequence[bool]) -> int | None:
    """Index of the first set bit (bit 0 = top port = highest priority)."""
    for i, b in enumerate(bits):
        if b:
            return i
    return None


@dataclass(frozen=True)
class TruthTable:
    """Immutable pattern table; patterns use {0, 1, *} with index 0 leftmost."""

    width: int
    rows: tuple[tuple[str, tuple[int, ...]], ...]
    default_outputs: tuple[int, ...]

    def __post_init__(self):
        for pattern, _ in self.rows:
            if len(pattern) != self.width or set(pattern) - {"0", "1", "*"}:
                raise ValueError(f"bad pattern {pattern!r}")

    def matches(self, pattern: str, bits: Sequence[bool]) -> bool:
        return all(c == "*" or bool(int(c)) == bool(b) for c, b in zip(pattern, bits))

    def match_rows(self, bits: Sequence[bool]) -> list[int]:
        """Indices of all rows matching the input (conflict checks)."""
        return [i for i, (pat, _) in enumerate(self.rows) if self.matches(pat, bits)]

    def lookup(self, bits: Sequence[bool]) -> tuple[int, ...]:
        hits = self.match_rows(bits)
        if not hits:
            return self.default_outputs
        if len(hits) > 1:
            outs = {self.rows[i][1] for i in hits}
            if len(outs) > 1:
                raise ValueError(f"conflicting rows {hits} for input {list(map(int, bits))}")
        return self.rows[hits[0]][1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        n_out = len(self.rows[0][1]) if self.rows else len(self.default_outputs)
        buf.write("pattern," + ",".join(f"out{j}" for j in range(n_out)) + "\n")
        for pattern, outs in self.rows:
            buf.write(pattern + "," + ",".join(str(o) for o in outs) + "\n")
        buf.write("*" * self.width + "," + ",".join(str(o) for o in self.default_outputs) + "\n")
        return buf.getvalue()


def wildcard_reduce(
    width: int,
    n_photons: int,
    outputs_for: Callable[[tuple[int, ...]], Sequence[int]] | None = None,
) -> TruthTable:
    """Table keyed on the first n set bits, one row per n-subset of ports.

    Each row is the exactly-n-ones pattern with every 0 after the final 1
    replaced by a wildcard, so any input with >= n ones matches exactly the
    row of its first n ones.  Appended to the outputs of outputs_for (default
    none) is one dump bit per port, set except on the n selected ports, so
    surplus photons on wildcard positions are discarded.
    """
    if not 0 <= n_photons <= width:
        raise ValueError("need 0 <= n_photons <= width")
    rows = []
    for ones in combinations(range(width), n_photons):
        base = tuple(1 if i in ones else 0 for i in range(width))
        last = ones[-1] if ones else -1
        pattern = "".join(str(b) for b in base[: last + 1]) + "*" * (width - last - 1)
        outs = tuple(outputs_for(base)) if outputs_for is not None else ()
        dump = tuple(0 if i in ones else 1 for i in range(width))
        rows.append((pattern, outs + dump))
    default = (tuple(0 for _ in range(len(rows[0][1]) - width)) if rows else ()) + (1,) * width
    return TruthTable(width=width, rows=tuple(rows), default_outputs=default)
