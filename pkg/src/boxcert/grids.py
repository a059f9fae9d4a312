"""Integer-indexed grids over a box domain and the hyperrectangles on them.

Grid points live at index/M per coordinate. Corner rectangles are stored as
integer index pairs so gadget weights can be formed from exact integer
products; converting an index to a coordinate divides once by M.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .intervals import BoxRegion

_SNAP_SLACK = 1e-9


def ramp_steepness(dim: int) -> int:
    """Power-of-two factor 2^(ceil(log2(2m))+1) that makes bumps collapse off-support."""
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    return 2 ** (math.ceil(math.log2(2 * dim)) + 1)


def _snap_index(value: float, cells_per_unit: int, outward: int) -> int:
    product = value * cells_per_unit
    nearest = round(product)
    if abs(product - nearest) <= _SNAP_SLACK * max(1.0, abs(product)):
        return int(nearest)
    return int(math.floor(product)) if outward < 0 else int(math.ceil(product))


@dataclass(frozen=True)
class GridSpec:
    """A grid of spacing 1/M covering a box, described by per-dim index ranges."""

    cells_per_unit: int
    index_lo: tuple[int, ...]
    index_hi: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.cells_per_unit < 1:
            raise ValueError("cells_per_unit must be at least 1")
        if len(self.index_lo) != len(self.index_hi):
            raise ValueError("index bounds disagree on dimension")
        for lo, hi in zip(self.index_lo, self.index_hi):
            if lo > hi:
                raise ValueError(f"empty index range [{lo}, {hi}]")

    @classmethod
    def for_box(cls, box: BoxRegion, cells_per_unit: int) -> "GridSpec":
        lo = tuple(_snap_index(b.lo, cells_per_unit, -1) for b in box.bounds)
        hi = tuple(_snap_index(b.hi, cells_per_unit, +1) for b in box.bounds)
        return cls(cells_per_unit, lo, hi)

    @property
    def dim(self) -> int:
        return len(self.index_lo)

    @property
    def ell(self) -> int:
        return ramp_steepness(self.dim)

    @property
    def domain(self) -> BoxRegion:
        m = self.cells_per_unit
        return BoxRegion.from_pairs([(lo / m, hi / m) for lo, hi in zip(self.index_lo, self.index_hi)])

    def coord(self, k: int, index: int) -> float:
        return index / self.cells_per_unit

    def cells(self, k: int) -> int:
        return self.index_hi[k] - self.index_lo[k]

    def pair_count(self, k: int) -> int:
        points = self.cells(k) + 1
        return points * (points + 1) // 2

    def rect_count(self) -> int:
        total = 1
        for k in range(self.dim):
            total *= self.pair_count(k)
        return total


@dataclass(frozen=True, order=True)
class HyperRect:
    """Corner set of a grid hyperrectangle, stored as integer index bounds."""

    lower: tuple[int, ...]
    upper: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.lower) != len(self.upper):
            raise ValueError("corner index vectors disagree on dimension")
        for lo, hi in zip(self.lower, self.upper):
            if lo > hi:
                raise ValueError(f"lower index {lo} exceeds upper index {hi}")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def hull(self, grid: GridSpec) -> BoxRegion:
        m = grid.cells_per_unit
        return BoxRegion.from_pairs([(lo / m, hi / m) for lo, hi in zip(self.lower, self.upper)])

    def neighborhood_hull(self, grid: GridSpec) -> BoxRegion:
        """Hull of the corner set expanded one grid step per side, clipped to the grid."""
        m = grid.cells_per_unit
        pairs = []
        for k, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            nlo = max(lo - 1, grid.index_lo[k])
            nhi = min(hi + 1, grid.index_hi[k])
            pairs.append((nlo / m, nhi / m))
        return BoxRegion.from_pairs(pairs)

    def contains(self, other: "HyperRect") -> bool:
        return all(a <= c and d <= b for a, b, c, d in zip(self.lower, self.upper, other.lower, other.upper))


def enclosing_rect(grid: GridSpec, box: BoxRegion) -> HyperRect:
    """Smallest grid hyperrectangle whose hull contains the box, clipped to the grid."""
    if box.dim != grid.dim:
        raise ValueError(f"box is {box.dim}-d but grid is {grid.dim}-d")
    m = grid.cells_per_unit
    lower = []
    upper = []
    for k, b in enumerate(box.bounds):
        lo = max(grid.index_lo[k], min(grid.index_hi[k], _snap_index(b.lo, m, -1)))
        hi = max(grid.index_lo[k], min(grid.index_hi[k], _snap_index(b.hi, m, +1)))
        lower.append(lo)
        upper.append(hi)
    return HyperRect(tuple(lower), tuple(upper))


def enumerate_rects(grid: GridSpec) -> Iterator[HyperRect]:
    """All grid hyperrectangles (degenerate sides included), in sorted index order."""
    per_dim = []
    for k in range(grid.dim):
        lo, hi = grid.index_lo[k], grid.index_hi[k]
        per_dim.append([(i, j) for i in range(lo, hi + 1) for j in range(i, hi + 1)])
    for combo in itertools.product(*per_dim):
        yield HyperRect(tuple(p[0] for p in combo), tuple(p[1] for p in combo))


def prune_maximal(rects: Sequence[HyperRect]) -> list[HyperRect]:
    """Keep only rectangles whose hull is not contained in another member's hull."""
    if not rects:
        return []
    dim = rects[0].dim
    if dim == 1:
        ordered = sorted(rects, key=lambda r: (r.lower[0], -r.upper[0]))
        kept: list[HyperRect] = []
        best_hi = -math.inf
        for r in ordered:
            if r.upper[0] > best_hi:
                kept.append(r)
                best_hi = r.upper[0]
        return sorted(kept)
    items = list(rects)
    lows = np.array([r.lower for r in items], dtype=np.int64)
    highs = np.array([r.upper for r in items], dtype=np.int64)
    dominated = np.zeros(len(items), dtype=bool)
    for j in range(len(items)):  # does member j strictly contain others?
        inside = (lows[j] <= lows).all(axis=1) & (highs[j] >= highs).all(axis=1)
        inside[j] = False
        proper = (lows[j] != lows).any(axis=1) | (highs[j] != highs).any(axis=1)
        dominated |= inside & proper
    return sorted(r for r, d in zip(items, dominated) if not d)
