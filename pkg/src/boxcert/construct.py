"""End-to-end construction of a certified network for an expression-defined f.

Pipeline: certify the range of f, slice it into slabs half a tolerance tall,
pick a grid fine enough that one cell moves f by at most half a slab, collect
for every slice the grid hyperrectangles whose certified minimum clears the
slice's upper level, sum a local bump per surviving rectangle, clip, and stack
the slices back up from the bottom level.

Membership uses the sampled (upper) end of the certified minimum. Any box that
exceeds a slice's level by half a slab snaps to an enclosing rectangle whose
true minimum still clears the level, so that rectangle is always collected;
conversely every collected rectangle has a true minimum within the sampling
margin of the level, and the margin is capped well below half a slab, which is
what forces distant boxes to propagate to exactly zero through the slice.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .expr import FuncExpr
from .gadgets import append_clip_above, append_local_bump
from .grids import GridSpec, HyperRect, enumerate_rects, prune_maximal
from .intervals import BoxRegion
from .netio import format_box_text
from .network import Network, NetworkBuilder, stats, sum_outputs, concat_outputs
from .oracle import certified_box_range
from .slicing import SliceSpec, make_slice_spec

RANGE_MARGIN_FRACTION = 16.0  # range margin target: delta / 16
RECT_MARGIN_FRACTION = 8.0  # per-rectangle margin target: delta' / 8


@dataclass(frozen=True)
class BuildBudget:
    max_candidates: int = 5_000_000
    max_bumps: int = 100_000
    max_oracle_samples: int = 4_000_000


DEFAULT_BUDGET = BuildBudget()


class BuildBudgetError(RuntimeError):
    """The build would exceed its resource budget; fail fast with sizing advice."""


@dataclass(frozen=True)
class BuildReport:
    expression: str
    requested_delta: float
    delta: float
    slice_count: int
    cells_per_unit: int
    lipschitz: float
    domain: BoxRegion
    bumps_per_slice: tuple[int, ...]
    candidate_rects: int
    relu_count: int
    node_count: int
    build_seconds: float

    def to_document(self) -> str:
        lines = [
            "boxcert-report 1",
            f"expression {self.expression}",
            f"requested_delta {self.requested_delta!r}",
            f"delta {self.delta!r}",
            f"slices {self.slice_count}",
            f"cells_per_unit {self.cells_per_unit}",
            f"lipschitz {self.lipschitz!r}",
            f"domain {format_box_text(self.domain, hex_floats=False)}",
            f"bumps_per_slice {','.join(str(n) for n in self.bumps_per_slice)}",
            f"candidate_rects {self.candidate_rects}",
            f"relu_count {self.relu_count}",
            f"node_count {self.node_count}",
            f"build_seconds {self.build_seconds:.3f}",
        ]
        return "\n".join(lines) + "\n"

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_document())


def grid_resolution(lipschitz: float, delta: float) -> int:
    """Smallest cell count per unit so one cell moves f by at most delta/2."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if lipschitz < 0:
        raise ValueError("Lipschitz bound must be nonnegative")
    return max(1, math.ceil(2.0 * lipschitz / delta))


def choose_grid_resolution(f: FuncExpr, delta: float) -> int:
    return grid_resolution(f.lipschitz, delta)


class CellMinTable:
    """Sampled minima of f over grid-rectangle hulls, from one shared lattice.

    The lattice subdivides every grid cell ``samples_per_cell`` times and
    includes all cell boundaries, so the minimum over a rectangle's hull is a
    contiguous-slab minimum with certificate margin L / (2 M s).
    """

    def __init__(self, f: FuncExpr, grid: GridSpec, samples_per_cell: int, budget: BuildBudget):
        if samples_per_cell < 1:
            raise ValueError("samples_per_cell must be at least 1")
        self.grid = grid
        self.samples_per_cell = samples_per_cell
        shape = tuple(grid.cells(k) * samples_per_cell + 1 for k in range(grid.dim))
        total = math.prod(shape)
        if total > budget.max_oracle_samples:
            raise BuildBudgetError(
                f"lattice of {total} samples exceeds the oracle budget "
                f"{budget.max_oracle_samples}; raise delta or the budget"
            )
        m = grid.cells_per_unit
        axes = [
            np.linspace(grid.index_lo[k] / m, grid.index_hi[k] / m, shape[k])
            for k in range(grid.dim)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.reshape(-1) for g in mesh], axis=1)
        self.values = f.eval_many(pts).reshape(shape)
        self.margin = f.lipschitz / (2.0 * m * samples_per_cell)

    def rect_min(self, rect: HyperRect) -> float:
        s = self.samples_per_cell
        sel = tuple(
            slice((rect.lower[k] - self.grid.index_lo[k]) * s,
                  (rect.upper[k] - self.grid.index_lo[k]) * s + 1)
            for k in range(self.grid.dim)
        )
        return float(self.values[sel].min())

    def all_rect_mins(self) -> tuple[list[HyperRect], np.ndarray]:
        rects = list(enumerate_rects(self.grid))
        mins = np.array([self.rect_min(r) for r in rects])
        return rects, mins


def samples_per_cell_for(lipschitz: float, cells_per_unit: int, target_margin: float) -> int:
    if target_margin <= 0:
        raise ValueError("target margin must be positive")
    if lipschitz == 0.0:
        return 1
    return max(1, math.ceil(lipschitz / (2.0 * cells_per_unit * target_margin)))


def enumerate_delta_k(
    f: FuncExpr,
    grid: GridSpec,
    spec: SliceSpec,
    k: int,
    prune: bool = True,
    budget: BuildBudget = DEFAULT_BUDGET,
) -> list[HyperRect]:
    """Grid hyperrectangles whose certified minimum clears level k+1."""
    if not 0 <= k < spec.count:
        raise ValueError(f"slice index {k} out of range for {spec.count} slices")
    if grid.rect_count() > budget.max_candidates:
        raise BuildBudgetError(
            f"{grid.rect_count()} candidate rectangles exceed the budget "
            f"{budget.max_candidates}; raise delta or lower the dimension"
        )
    target = spec.delta / RECT_MARGIN_FRACTION if spec.delta > 0 else 1.0
    table = CellMinTable(f, grid, samples_per_cell_for(f.lipschitz, grid.cells_per_unit, target), budget)
    threshold = spec.levels[k + 1]
    rects, mins = table.all_rect_mins()
    members = [r for r, v in zip(rects, mins) if v >= threshold]
    return prune_maximal(members) if prune else sorted(members)


def build_slice_network(delta_k: Sequence[HyperRect], grid: GridSpec) -> Network:
    """Clip-to-one of the sum of bumps; the constant-zero network when empty."""
    b = NetworkBuilder(grid.dim)
    source = b.concat(b.input_ids) if grid.dim > 1 else b.input_id(0)
    if not delta_k:
        out = b.affine(source, [[0.0] * grid.dim], [0.0])
    else:
        bumps = [append_local_bump(b, grid, rect, source) for rect in sorted(delta_k)]
        total = b.sum(bumps) if len(bumps) > 1 else bumps[0]
        out = append_clip_above(b, total, 1.0)
    return b.finish(out, {"kind": "slice", "bumps": str(len(delta_k))})


def _constant_network(dim: int, value: float) -> Network:
    b = NetworkBuilder(dim)
    source = b.concat(b.input_ids) if dim > 1 else b.input_id(0)
    return b.finish(b.affine(source, [[0.0] * dim], [float(value)]))


def _finalize(
    net: Network,
    f: FuncExpr,
    requested: float,
    adjusted: float,
    spec_count: int,
    cells: int,
    lipschitz: float,
    domain: BoxRegion,
    bumps: tuple[int, ...],
    candidates: int,
    started: float,
    levels: tuple[float, ...] = (),
) -> tuple[Network, BuildReport]:
    counts = stats(net)
    metadata = {
        "generator": "boxcert-build",
        "expression": f.source,
        "domain": format_box_text(domain, hex_floats=True),
        "delta_requested": float(requested).hex(),
        "delta": float(adjusted).hex(),
        "slices": str(spec_count),
        "cells_per_unit": str(cells),
        "lipschitz": float(lipschitz).hex(),
        "bumps": ",".join(str(n) for n in bumps),
    }
    if levels:
        metadata["levels"] = " ".join(float(v).hex() for v in levels)
    final = Network(net.nodes, net.output, net.input_dim, metadata)
    report = BuildReport(
        expression=f.source,
        requested_delta=requested,
        delta=adjusted,
        slice_count=spec_count,
        cells_per_unit=cells,
        lipschitz=lipschitz,
        domain=domain,
        bumps_per_slice=bumps,
        candidate_rects=candidates,
        relu_count=counts["relu_count"],
        node_count=counts["node_count"],
        build_seconds=time.perf_counter() - started,
    )
    return final, report


def build_certified_network(
    f: FuncExpr, delta: float, budget: BuildBudget = DEFAULT_BUDGET
) -> tuple[Network, BuildReport]:
    """Build a network whose propagated intervals bracket f's range within delta."""
    started = time.perf_counter()
    if delta <= 0:
        raise ValueError("delta must be positive")

    # The grid snaps the domain outward to index points, and the Lipschitz
    # bound and range must be certified over the snapped domain; iterate the
    # sizing until the domain stops moving (immediately, for grid-aligned
    # corners).
    domain = f.domain
    spec: SliceSpec | None = None
    cells = 1
    lipschitz = 0.0
    for _ in range(8):
        fd = f.with_domain(domain)
        lipschitz = fd.lipschitz
        if lipschitz == 0.0:
            value = fd.eval([b.mid for b in domain.bounds])
            net = _constant_network(f.dim, value)
            return _finalize(net, fd, delta, 0.0, 1, 1, 0.0, domain, (0,), 0, started)
        cmin, cmax = certified_box_range(
            fd, domain, delta / RANGE_MARGIN_FRACTION, DEFAULT_BUDGET.max_oracle_samples
        )
        spec = make_slice_spec(cmin.value, cmax.value, delta)
        if spec.delta == 0.0:
            # flat sampled range but nonzero Lipschitz bound: the constant
            # network is still within delta because the range margin is far
            # below delta/2, and that is the honest tolerance to report
            net = _constant_network(f.dim, cmin.value)
            return _finalize(net, fd, delta, delta, 1, 1, lipschitz, domain, (0,), 0, started)
        cells = grid_resolution(lipschitz, spec.delta)
        snapped = GridSpec.for_box(f.domain, cells).domain
        if snapped == domain:
            break
        domain = snapped
    else:
        raise BuildBudgetError("grid sizing did not stabilize; check the domain bounds")

    assert spec is not None
    fd = f.with_domain(domain)
    grid = GridSpec.for_box(f.domain, cells)
    candidates = grid.rect_count()
    if candidates > budget.max_candidates:
        raise BuildBudgetError(
            f"{candidates} candidate rectangles exceed the budget {budget.max_candidates}; "
            f"raise delta or lower the input dimension (enumeration grows like M^(2m))"
        )

    target = spec.delta / RECT_MARGIN_FRACTION
    table = CellMinTable(fd, grid, samples_per_cell_for(lipschitz, cells, target), budget)
    rects, mins = table.all_rect_mins()
    order = np.argsort(mins, kind="stable")
    sorted_mins = mins[order]
    sorted_rects = [rects[i] for i in order]

    slice_sets: list[list[HyperRect]] = []
    for k in range(spec.count):
        cut = int(np.searchsorted(sorted_mins, spec.levels[k + 1], side="left"))
        slice_sets.append(prune_maximal(sorted_rects[cut:]))
    total_bumps = sum(len(s) for s in slice_sets)
    if total_bumps > budget.max_bumps:
        raise BuildBudgetError(
            f"{total_bumps} bumps exceed the budget {budget.max_bumps}; raise delta"
        )

    slice_nets = [build_slice_network(members, grid) for members in slice_sets]
    assembled = sum_outputs(slice_nets, [spec.half_delta] * spec.count, bias=spec.bottom)
    return _finalize(
        assembled,
        fd,
        delta,
        spec.delta,
        spec.count,
        cells,
        lipschitz,
        domain,
        tuple(len(s) for s in slice_sets),
        candidates,
        started,
        levels=spec.levels,
    )


def build_vector_valued(
    fs: Sequence[FuncExpr], deltas: Sequence[float], budget: BuildBudget = DEFAULT_BUDGET
) -> Network:
    """Componentwise certified builds concatenated into one vector-valued network."""
    if not fs:
        raise ValueError("need at least one component function")
    if len(fs) != len(deltas):
        raise ValueError("need one delta per component")
    domain = fs[0].domain
    for g in fs[1:]:
        if g.domain != domain:
            raise ValueError("all components must share the same domain")
    built = [build_certified_network(g, d, budget) for g, d in zip(fs, deltas)]
    combined = concat_outputs([net for net, _ in built])
    metadata: dict[str, str] = {"generator": "boxcert-build-vector", "components": str(len(built))}
    for i, (net, _) in enumerate(built):
        for key, value in net.metadata.items():
            metadata[f"c{i}.{key}"] = value
    return Network(combined.nodes, combined.output, combined.input_dim, metadata)
