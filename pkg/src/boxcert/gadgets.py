"""ReLU gadgets the certified construction is assembled from.

``build_nmin2`` is the symmetric four-unit min network

    min(x, y) = 1/2 * (1, -1, -1, -1) . R([[1, 1], [-1, -1], [1, -1], [-1, 1]] (x, y))

whose interval behavior admits a closed form (see
``intervals.nmin2_closed_form``). ``build_nmin_n`` splits its arguments in
halves of ceil(n/2) and n - ceil(n/2) and recurses. Local bumps clamp 2m ramps
to 1, take the min, and rectify; the ramp steepness factor is large enough that
a box one grid step away from the corner hull propagates to exactly [0, 0].
"""

from __future__ import annotations

import math
from typing import Sequence

from .grids import GridSpec, HyperRect
from .network import Network, NetworkBuilder

NMIN2_HIDDEN = ((1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0))
NMIN2_OUT = ((0.5, -0.5, -0.5, -0.5),)


def append_nmin2(b: NetworkBuilder, left: int, right: int) -> int:
    """Min of two scalar nodes via the four-unit gadget."""
    pair = b.concat([left, right])
    hidden = b.relu(b.affine(pair, NMIN2_HIDDEN, (0.0, 0.0, 0.0, 0.0)))
    return b.affine(hidden, NMIN2_OUT, (0.0,))


def append_nmin_tree(b: NetworkBuilder, args: Sequence[int]) -> int:
    """Min of scalar nodes, recursing on the first ceil(n/2) and the rest."""
    if not args:
        raise ValueError("min tree needs at least one argument")
    if len(args) == 1:
        return args[0]
    half = math.ceil(len(args) / 2)
    return append_nmin2(b, append_nmin_tree(b, args[:half]), append_nmin_tree(b, args[half:]))


def build_nmin2() -> Network:
    b = NetworkBuilder(2)
    out = append_nmin2(b, b.input_id(0), b.input_id(1))
    return b.finish(out)


def build_nmin_n(n: int) -> Network:
    if n < 1:
        raise ValueError("min network needs at least one input")
    b = NetworkBuilder(n)
    out = append_nmin_tree(b, b.input_ids)
    return b.finish(out)


def append_clip_above(b: NetworkBuilder, pred: int, bound: float) -> int:
    """Elementwise bound - R(bound - x), saturating values above the bound."""
    width = b.arity(pred)
    neg_eye = [[-1.0 if j == i else 0.0 for j in range(width)] for i in range(width)]
    biases = [float(bound)] * width
    inner = b.relu(b.affine(pred, neg_eye, biases))
    return b.affine(inner, neg_eye, biases)


def build_clip_above(bound: float) -> Network:
    b = NetworkBuilder(1)
    out = append_clip_above(b, b.input_id(0), bound)
    return b.finish(out)


def bump_relu_budget(dim: int) -> int:
    """Unit-count estimate 1 + 2(2m - 1) + 2m for a bump over an m-dim grid."""
    return 1 + 2 * (2 * dim - 1) + 2 * dim


def append_local_bump(b: NetworkBuilder, grid: GridSpec, rect: HyperRect, source: int) -> int:
    """Bump that is 1 on the rect's hull and 0 one grid step beyond it.

    ``source`` must be an m-wide node carrying the raw input coordinates. Each
    ramp is fused with the first clipping stage, so its affine row computes
    1 - ramp directly from integer-exact weights M*ell and ell*index.
    """
    m = grid.dim
    if rect.dim != m:
        raise ValueError(f"rect is {rect.dim}-d but grid is {m}-d")
    for k in range(m):
        if rect.lower[k] < grid.index_lo[k] or rect.upper[k] > grid.index_hi[k]:
            raise ValueError(f"rect corner outside the grid in dimension {k}")
    steep = float(grid.cells_per_unit * grid.ell)
    ramps: list[int] = []
    for k in range(m):
        row_lo = [0.0] * m
        row_lo[k] = -steep
        row_hi = [0.0] * m
        row_hi[k] = steep
        for row, offset in (
            (row_lo, float(grid.ell * rect.lower[k])),
            (row_hi, float(-grid.ell * rect.upper[k])),
        ):
            inner = b.relu(b.affine(source, [row], [offset]))
            ramps.append(b.affine(inner, [[-1.0]], [1.0]))
    return b.relu(append_nmin_tree(b, ramps))


def build_local_bump(grid: GridSpec, rect: HyperRect) -> Network:
    b = NetworkBuilder(grid.dim)
    source = b.concat(b.input_ids) if grid.dim > 1 else b.input_id(0)
    out = append_local_bump(b, grid, rect, source)
    return b.finish(
        out,
        {
            "kind": "local-bump",
            "relu_budget_formula": str(bump_relu_budget(grid.dim)),
            "cells_per_unit": str(grid.cells_per_unit),
        },
    )


def bump_closed_form(grid: GridSpec, rect: HyperRect, x: Sequence[float]) -> float:
    """Direct evaluation of the bump's piecewise-linear shape, for testing.

    Computes the ramps as written, M*ell*(x_k - i/M) + 1, then clamps the min
    to [0, 1]; this follows a different float path than the network.
    """
    m = grid.cells_per_unit
    steep = m * grid.ell
    smallest = math.inf
    for k in range(grid.dim):
        lo_ramp = steep * (x[k] - rect.lower[k] / m) + 1.0
        hi_ramp = steep * (rect.upper[k] / m - x[k]) + 1.0
        smallest = min(smallest, lo_ramp, hi_ramp)
    return max(0.0, min(1.0, smallest))
