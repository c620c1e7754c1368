"""Wave evaluation from boundary controls via the hydra representation.

The wave driven by a control phi acting at a source vertex takes, at a point
x and time t, the value sum over hydra times sigma above x of
a(x, sigma) * phi(t - sigma); controls are extended by zero to t < 0.  With
piecewise-linear rational controls every value here is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .graph import (EdgePoint, GraphPoint, MetricGraph, Region, VertexPoint,
                    format_rational, parse_rational, validate_point)
from .hydra import HydraUnion
from .lattice import Family, Partition
from .eikonal import GridError, apply_projection


@dataclass(frozen=True)
class Control:
    """Piecewise-linear boundary controls, one profile per source.

    Each profile is a sorted tuple of (time, value) breakpoints inside
    [0, T].  Between breakpoints the profile interpolates linearly; before
    the first and after the last breakpoint it extends with the boundary
    value; for t < 0 every control is zero.
    """

    profiles: tuple[tuple[str, tuple[tuple[Fraction, Fraction], ...]], ...]

    @staticmethod
    def from_dict(doc: Mapping[str, Sequence]) -> "Control":
        profs = []
        for gamma in sorted(doc):
            pts = [(parse_rational(p["t"]), parse_rational(p["value"]))
                   for p in doc[gamma]]
            pts.sort()
            if not pts:
                raise ValueError(f"control for {gamma!r} has no breakpoints")
            profs.append((gamma, tuple(pts)))
        return Control(tuple(profs))

    @staticmethod
    def from_json(text: str) -> "Control":
        return Control.from_dict(json.loads(text))

    @staticmethod
    def single(gamma: str,
               breakpoints: Iterable[tuple[Fraction, Fraction]]) -> "Control":
        return Control.from_dict(
            {gamma: [{"t": t, "value": v} for t, v in breakpoints]})

    @property
    def sources(self) -> tuple[str, ...]:
        return tuple(gamma for gamma, _ in self.profiles)

    def value(self, gamma: str, t: Fraction) -> Fraction:
        if t < 0:
            return Fraction(0)
        for g, pts in self.profiles:
            if g != gamma:
                continue
            if t <= pts[0][0]:
                return pts[0][1]
            for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
                if t <= t1:
                    if t1 == t0:
                        return v1
                    return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            return pts[-1][1]
        return Fraction(0)

    def to_dict(self) -> dict:
        return {gamma: [{"t": format_rational(t), "value": format_rational(v)}
                        for t, v in pts]
                for gamma, pts in self.profiles}


def hat(center: Fraction, halfwidth: Fraction,
        height: Fraction = Fraction(1)) -> list[tuple[Fraction, Fraction]]:
    """Breakpoints of a triangular pulse, clipped at t = 0."""
    pts = [(center - halfwidth, Fraction(0)), (center, height),
           (center + halfwidth, Fraction(0))]
    out = [(t, v) for t, v in pts if t >= 0]
    if out and out[0][0] > 0 and len(out) < 3:
        out.insert(0, (Fraction(0), Fraction(0)))
    return out


@dataclass
class SampledFunction:
    """Function on the graph sampled at the midpoints of a uniform grid.

    ``values[edge][k]`` approximates the function on the open grid cell
    (k*h, (k+1)*h); a piecewise-constant function commensurable with the grid
    is represented exactly.  Values may be Fractions (exact paths) or floats.
    """

    graph: MetricGraph
    step: Fraction
    values: dict[str, list]

    @staticmethod
    def zeros(g: MetricGraph, h: Fraction) -> "SampledFunction":
        vals = {}
        for e in g.edges:
            n = e.length / h
            if n.denominator != 1:
                raise GridError(f"grid step {h} does not divide edge {e.id!r}")
            vals[e.id] = [Fraction(0)] * int(n)
        return SampledFunction(g, h, vals)

    @staticmethod
    def from_function(g: MetricGraph, h: Fraction,
                      fn: Callable[[EdgePoint], object]) -> "SampledFunction":
        out = SampledFunction.zeros(g, h)
        half = Fraction(1, 2)
        for eid, vals in out.values.items():
            for k in range(len(vals)):
                vals[k] = fn(EdgePoint(eid, (k + half) * h))
        return out

    def midpoint(self, eid: str, k: int) -> EdgePoint:
        return EdgePoint(eid, (k + Fraction(1, 2)) * self.step)

    def copy(self) -> "SampledFunction":
        return SampledFunction(self.graph, self.step,
                               {e: list(v) for e, v in self.values.items()})

    def iadd(self, other: "SampledFunction") -> None:
        for eid, vals in self.values.items():
            for k, x in enumerate(other.values[eid]):
                vals[k] = vals[k] + x

    def sub(self, other: "SampledFunction") -> "SampledFunction":
        out = self.copy()
        for eid, vals in out.values.items():
            for k, x in enumerate(other.values[eid]):
                vals[k] = vals[k] - x
        return out

    def scale(self, c) -> "SampledFunction":
        out = self.copy()
        for vals in out.values.values():
            for k in range(len(vals)):
                vals[k] = c * vals[k]
        return out

    def refine(self, factor: int) -> "SampledFunction":
        """Same piecewise-constant function on a grid ``factor`` times finer."""
        vals = {e: [x for x in v for _ in range(factor)]
                for e, v in self.values.items()}
        return SampledFunction(self.graph, self.step / factor, vals)

    def inner(self, other: "SampledFunction") -> float:
        acc = 0.0
        for eid, vals in self.values.items():
            for a, b in zip(vals, other.values[eid]):
                acc += float(a) * float(b)
        return acc * float(self.step)

    def norm(self) -> float:
        return self.inner(self) ** 0.5

    def max_abs(self) -> float:
        return max((abs(float(x)) for v in self.values.values() for x in v),
                   default=0.0)

    def vanishes_outside(self, region: Region) -> bool:
        for eid, vals in self.values.items():
            for k, x in enumerate(vals):
                if x != 0 and not region.contains(self.midpoint(eid, k)):
                    return False
        return True


# -- evaluation -----------------------------------------------------------------

def evaluate_wave(hu: HydraUnion, control: Control, x: GraphPoint,
                  t: Fraction):
    """Wave value at (x, t).  Interior-vertex values are the one-sided limit
    along the first incident edge in id order (the wave is continuous across
    interior vertices, so the choice is immaterial)."""
    if t < 0 or t > hu.horizon:
        raise ValueError("time outside the hydra horizon")
    g = hu.graph
    validate_point(g, x)
    total = Fraction(0)
    for gamma, h in hu.hydras.items():
        contributions: dict[Fraction, Fraction] = {}
        if isinstance(x, VertexPoint):
            if g.vertex(x.vertex).boundary:
                if x.vertex == gamma:
                    contributions[Fraction(0)] = Fraction(1)
            else:
                eid = g.incident(x.vertex)[0]
                e = g.edge(eid)
                for seg in h.segments_on(eid):
                    if seg.s_lo == 0 and e.tail == x.vertex:
                        s_end = seg.s_lo
                    elif seg.s_hi == e.length and e.head == x.vertex:
                        s_end = seg.s_hi
                    else:
                        continue
                    sigma = seg.time_at(s_end)
                    contributions[sigma] = (contributions.get(sigma, Fraction(0))
                                            + seg.amplitude)
        else:
            for seg in h.segments_on(x.edge):
                if seg.s_lo <= x.s <= seg.s_hi:
                    sigma = seg.time_at(x.s)
                    contributions[sigma] = (contributions.get(sigma, Fraction(0))
                                            + seg.amplitude)
        for sigma, amp in contributions.items():
            total += amp * control.value(gamma, t - sigma)
    return total


def wave_snapshot(hu: HydraUnion, control: Control, t: Fraction,
                  h: Fraction) -> SampledFunction:
    """Midpoint samples of the wave at time t."""
    return SampledFunction.from_function(
        hu.graph, h, lambda x: evaluate_wave(hu, control, x, t))


def represent_on_family(fam: Family, gamma: str, psis: Sequence[Sequence],
                        h: Fraction, g: MetricGraph) -> SampledFunction:
    """Assemble sum_i alpha^i_m psi_i(r) on the family cells, zero elsewhere.
    ``psis`` holds one midpoint-sample list per window."""
    from .eikonal import amplitude_vectors, check_commensurable, _slot
    n_r = check_commensurable(fam, h)
    if len(psis) != fam.n_windows:
        raise ValueError(f"expected {fam.n_windows} profiles, got {len(psis)}")
    for psi in psis:
        if len(psi) != n_r:
            raise ValueError(f"profiles must have {n_r} samples")
    vectors = amplitude_vectors(fam, gamma)
    out = SampledFunction.zeros(g, h)
    for m, cell in enumerate(fam.cells):
        for j in range(n_r):
            val = sum((alpha[m] * psi[j] for alpha, psi in zip(vectors, psis)),
                      Fraction(0))
            out.values[cell.edge][_slot(cell, h, j, n_r)] = val
    return out


@dataclass(frozen=True)
class ReachabilityReport:
    reachable: bool
    residual: float


def is_reachable(p: Partition, sources: Iterable[str], y: SampledFunction,
                 tol: float = 1e-9) -> ReachabilityReport:
    """Relative distance of y from the reachable set of the given sources:
    residual = ||y - P y|| / ||y|| with the per-family span projection,
    zero outside the filled region."""
    py = apply_projection(p, sources, y)
    norm = y.norm()
    if norm == 0.0:
        return ReachabilityReport(True, 0.0)
    residual = y.sub(py).norm() / norm
    return ReachabilityReport(residual <= tol, residual)


def snapshot_csv(y: SampledFunction) -> str:
    lines = ["edge,s,value"]
    for eid in sorted(y.values):
        for k, val in enumerate(y.values[eid]):
            s = y.midpoint(eid, k).s
            lines.append(f"{eid},{format_rational(s)},{float(val):.17g}")
    return "\n".join(lines) + "\n"
