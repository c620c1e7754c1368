"""Lattice closures on a hydra, critical points, and the cell partition.

Two hydra points are neighbors when they share a position or a time; the
closure of a point set under both fiber maps is a finite "lattice".  The
positions of the lattice of corner points are the critical points; they cut
the wave-filled region into open intervals (cells).  Time fibers carry whole
cells onto whole cells, so grouping cells into families and assigning them a
common parameter r is a finite, exact computation:

* the time axis splits into gaps between consecutive lattice times, and the
  restriction of any segment to a cell ("trace") occupies exactly one gap;
* cells and gaps linked by traces form the families;
* per family, cell orientations and gap slopes are solved so that every
  trace over one gap induces the same affine time map r -> t.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .graph import (EdgePoint, GraphPoint, MetricGraph, Region, VertexPoint,
                    format_rational, neighborhood)
from .hydra import HydraUnion, SpaceTimePoint, corner_points

DEFAULT_MAX_CLOSURE = 10**5


class LatticeCapError(RuntimeError):
    """Raised when a lattice closure exceeds the configured point budget."""

    def __init__(self, count: int):
        super().__init__(f"lattice closure exceeded the point cap at {count} points")
        self.count = count


class PartitionError(RuntimeError):
    """Internal inconsistency while building the partition."""


def lattice_closure(hu: HydraUnion, seeds: Iterable[SpaceTimePoint],
                    max_points: int = DEFAULT_MAX_CLOSURE
                    ) -> frozenset[SpaceTimePoint]:
    """Smallest superset of ``seeds`` closed under space and time fibers."""
    pts: set[SpaceTimePoint] = set()
    stack: list[SpaceTimePoint] = []
    for p in seeds:
        if p not in hu.pi_fiber(p.point):
            raise ValueError(f"seed {p} does not lie on the hydra")
        if p not in pts:
            pts.add(p)
            stack.append(p)
    seen_pos: set[GraphPoint] = set()
    seen_time: set[Fraction] = set()
    while stack:
        p = stack.pop()
        new: list[SpaceTimePoint] = []
        if p.point not in seen_pos:
            seen_pos.add(p.point)
            new.extend(hu.pi_fiber(p.point))
        if p.time not in seen_time:
            seen_time.add(p.time)
            new.extend(hu.rho_fiber(p.time))
        for q in new:
            if q not in pts:
                pts.add(q)
                stack.append(q)
        if len(pts) > max_points:
            raise LatticeCapError(len(pts))
    return frozenset(pts)


def critical_points(hu: HydraUnion,
                    max_points: int = DEFAULT_MAX_CLOSURE) -> frozenset[GraphPoint]:
    """Positions of the lattice closure of all corner points."""
    closure = lattice_closure(hu, corner_points(hu), max_points)
    return frozenset(p.point for p in closure)


# -- partition data model -----------------------------------------------------

@dataclass(frozen=True)
class Cell:
    """Open critical-point-free interval of an edge.  ``orient`` fixes the
    family parameter: r = s - lo when +1, r = hi - s when -1."""

    edge: str
    lo: Fraction
    hi: Fraction
    orient: int

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def point_at(self, r: Fraction) -> EdgePoint:
        s = self.lo + r if self.orient == 1 else self.hi - r
        return EdgePoint(self.edge, s)

    def param_of(self, s: Fraction) -> Fraction:
        return s - self.lo if self.orient == 1 else self.hi - s


@dataclass(frozen=True)
class AffineMap:
    """t(r) = offset + sign * r with sign in {+1, -1}."""

    offset: Fraction
    sign: int

    def __call__(self, r: Fraction) -> Fraction:
        return self.offset + self.sign * r


@dataclass
class Family:
    """Equivalence class of equal-length cells swept jointly in time.

    ``windows[i]`` is (T_i, lam_i): during the open interval
    (T_i, T_i + delta) the common time map is t_i(r) = T_i + r for lam = +1,
    t_i(r) = T_i + delta - r for lam = -1.  ``traces`` maps
    (source, window index, cell index) to the constant branch amplitude of
    that source's hydra over the cell during the window.
    """

    cells: tuple[Cell, ...]
    delta: Fraction
    windows: tuple[tuple[Fraction, int], ...]
    traces: dict[tuple[str, int, int], Fraction] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.cells)

    @property
    def n_windows(self) -> int:
        return len(self.windows)

    def interval(self, i: int) -> tuple[Fraction, Fraction]:
        start = self.windows[i][0]
        return (start, start + self.delta)

    def time_map(self, i: int) -> AffineMap:
        start, lam = self.windows[i]
        if lam == 1:
            return AffineMap(start, 1)
        return AffineMap(start + self.delta, -1)

    def amplitude(self, gamma: str, i: int, m: int) -> Fraction:
        return self.traces.get((gamma, i, m), Fraction(0))

    def has_trace(self, gamma: str, i: int) -> bool:
        return any(key[0] == gamma and key[1] == i for key in self.traces)


def tau_functions(fam: Family, gamma: str) -> list[Optional[AffineMap]]:
    """Per window: the affine time map when the source's hydra meets the
    family during that window, else None (an explicit "absent", since 0 is a
    legitimate time value)."""
    return [fam.time_map(i) if fam.has_trace(gamma, i) else None
            for i in range(fam.n_windows)]


@dataclass
class Partition:
    graph: MetricGraph
    sigma: tuple[str, ...]
    horizon: Fraction
    critical: frozenset[GraphPoint]
    region: Region
    families: tuple[Family, ...]

    def locate(self, x: EdgePoint) -> tuple[int, int, Fraction]:
        """(family index, cell index, parameter r) of a non-critical point
        inside the filled region."""
        for j, fam in enumerate(self.families):
            for m, cell in enumerate(fam.cells):
                if cell.edge == x.edge and cell.lo < x.s < cell.hi:
                    return j, m, cell.param_of(x.s)
        raise ValueError(
            f"{x} is critical or outside the wave-filled region")

    @property
    def critical_positions(self) -> list[GraphPoint]:
        def key(p: GraphPoint):
            if isinstance(p, VertexPoint):
                return (0, p.vertex, Fraction(0))
            return (1, p.edge, p.s)
        return sorted(self.critical, key=key)


def determination_set(p: Partition, x: EdgePoint) -> list[EdgePoint]:
    """The points, one per cell of x's family, sharing x's lattice; x is
    among them."""
    _, _, r = p.locate(x)
    fam = p.families[p.locate(x)[0]]
    return [cell.point_at(r) for cell in fam.cells]


# -- partition construction ---------------------------------------------------

class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, a):
        self.parent.setdefault(a, a)
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def build_partition(hu: HydraUnion,
                    max_closure: int = DEFAULT_MAX_CLOSURE) -> Partition:
    g = hu.graph
    closure = lattice_closure(hu, corner_points(hu), max_closure)
    theta = frozenset(p.point for p in closure)
    region = neighborhood(g, [VertexPoint(s) for s in hu.sources], hu.horizon)

    # Atomic cells: region intervals split at interior critical positions.
    theta_on_edge: dict[str, list[Fraction]] = {}
    for p in theta:
        if isinstance(p, EdgePoint):
            theta_on_edge.setdefault(p.edge, []).append(p.s)
    raw_cells: list[tuple[str, Fraction, Fraction]] = []
    for eid, intervals in region.intervals:
        cuts = sorted(theta_on_edge.get(eid, []))
        for lo, hi in intervals:
            inner = [s for s in cuts if lo < s < hi]
            bounds = [lo] + inner + [hi]
            for a, b in zip(bounds, bounds[1:]):
                raw_cells.append((eid, a, b))
    raw_cells.sort()
    cells_on_edge: dict[str, list[int]] = {}
    for idx, (eid, _, _) in enumerate(raw_cells):
        cells_on_edge.setdefault(eid, []).append(idx)

    # Time gaps between consecutive lattice times.
    times = sorted({p.time for p in closure} | {Fraction(0), hu.horizon})
    gaps = [(a, b) for a, b in zip(times, times[1:])]
    gap_starts = [a for a, _ in gaps]

    # Traces: the restriction of each segment to each cell it covers.
    traces: list[tuple[int, int, int, str, Fraction]] = []
    seen_keys: set[tuple[str, int, int]] = set()
    for seg in hu.all_segments():
        for idx in cells_on_edge.get(seg.edge, ()):
            _, lo, hi = raw_cells[idx]
            if lo >= seg.s_hi or hi <= seg.s_lo:
                continue
            if not (seg.s_lo <= lo and hi <= seg.s_hi):
                raise PartitionError(
                    f"segment {seg} partially overlaps cell {raw_cells[idx]}; "
                    "critical points are incomplete")
            ta, tb = sorted((seg.time_at(lo), seg.time_at(hi)))
            k = bisect_right(gap_starts, ta) - 1
            if k < 0 or gaps[k] != (ta, tb):
                raise PartitionError(
                    f"trace time range ({ta}, {tb}) is not a lattice gap")
            key = (seg.source, idx, k)
            if key in seen_keys:
                raise PartitionError(
                    f"two branches of source {seg.source!r} share cell/window "
                    f"{key}; time values would be multivalued")
            seen_keys.add(key)
            traces.append((idx, k, seg.slope, seg.source, seg.amplitude))

    # Families: connected components of the cell/gap incidence.
    uf = _UnionFind()
    for idx, k, _, _, _ in traces:
        uf.union(("c", idx), ("g", k))
    groups: dict[object, dict[str, list[int]]] = {}
    for idx in range(len(raw_cells)):
        root = uf.find(("c", idx))
        groups.setdefault(root, {"cells": [], "gaps": []})["cells"].append(idx)
    for k in {k for _, k, _, _, _ in traces}:
        groups[uf.find(("g", k))]["gaps"].append(k)
    for root, grp in groups.items():
        if not grp["gaps"]:
            raise PartitionError(
                f"cell {raw_cells[grp['cells'][0]]} carries no hydra trace")

    families: list[Family] = []
    ordered = sorted(groups.values(), key=lambda grp: min(grp["cells"]))
    for grp in ordered:
        cell_ids = sorted(grp["cells"])
        gap_ids = sorted(grp["gaps"], key=lambda k: gaps[k][0])
        local_cell = {idx: m for m, idx in enumerate(cell_ids)}
        local_gap = {k: i for i, k in enumerate(gap_ids)}
        delta = raw_cells[cell_ids[0]][2] - raw_cells[cell_ids[0]][1]
        for idx in cell_ids:
            if raw_cells[idx][2] - raw_cells[idx][1] != delta:
                raise PartitionError("cells of one family differ in length")
        for k in gap_ids:
            if gaps[k][1] - gaps[k][0] != delta:
                raise PartitionError("family window length differs from cell length")
        fam_traces = [(local_cell[idx], local_gap[k], slope, src, amp)
                      for idx, k, slope, src, amp in traces if idx in local_cell]

        # Solve orientations: for every trace, slope * orient(cell) must
        # equal the window slope lam; anchor so that the earliest window
        # touching the reference cell ascends with r.
        by_cell: dict[int, list[tuple[int, int, int]]] = {}
        by_gap: dict[int, list[tuple[int, int, int]]] = {}
        for m, i, slope, _, _ in fam_traces:
            by_cell.setdefault(m, []).append((m, i, slope))
            by_gap.setdefault(i, []).append((m, i, slope))
        orient: dict[int, int] = {}
        lam: dict[int, int] = {}
        anchor = min(by_cell[0], key=lambda t: t[1])
        orient[0] = anchor[2]
        queue = [("c", 0)]
        while queue:
            kind, a = queue.pop()
            items = by_cell[a] if kind == "c" else by_gap[a]
            for m, i, slope in items:
                if kind == "c":
                    want = slope * orient[m]
                    if i in lam:
                        if lam[i] != want:
                            raise PartitionError("cell-orientation conflict")
                    else:
                        lam[i] = want
                        queue.append(("g", i))
                else:
                    want = slope * lam[i]
                    if m in orient:
                        if orient[m] != want:
                            raise PartitionError("cell-orientation conflict")
                    else:
                        orient[m] = want
                        queue.append(("c", m))
        if len(orient) != len(cell_ids) or len(lam) != len(gap_ids):
            raise PartitionError("family is not trace-connected")

        cells = tuple(Cell(raw_cells[idx][0], raw_cells[idx][1],
                           raw_cells[idx][2], orient[local_cell[idx]])
                      for idx in cell_ids)
        windows = tuple((gaps[k][0], lam[local_gap[k]]) for k in gap_ids)
        tr = {(src, i, m): amp for m, i, _, src, amp in fam_traces}
        families.append(Family(cells, delta, windows, tr))

    return Partition(g, hu.sources, hu.horizon, theta, region, tuple(families))


# -- exports ------------------------------------------------------------------

def partition_to_json_dict(p: Partition) -> dict:
    from .hydra import point_to_json
    fams = []
    for fam in p.families:
        fams.append({
            "delta": format_rational(fam.delta),
            "cells": [{"edge": c.edge, "lo": format_rational(c.lo),
                       "hi": format_rational(c.hi), "orient": c.orient}
                      for c in fam.cells],
            "windows": [{"start": format_rational(start),
                         "end": format_rational(start + fam.delta),
                         "slope": lam}
                        for start, lam in fam.windows],
            "traces": [
                {"source": src, "window": i, "cell": m,
                 "amplitude": format_rational(amp)}
                for (src, i, m), amp in sorted(fam.traces.items())
            ],
        })
    return {
        "horizon": format_rational(p.horizon),
        "sources": list(p.sigma),
        "critical_points": [point_to_json(x) for x in p.critical_positions],
        "families": fams,
    }


def critical_points_csv(p: Partition) -> str:
    lines = ["kind,id,s"]
    for x in p.critical_positions:
        if isinstance(x, VertexPoint):
            lines.append(f"vertex,{x.vertex},")
        else:
            lines.append(f"edge,{x.edge},{format_rational(x.s)}")
    return "\n".join(lines) + "\n"
