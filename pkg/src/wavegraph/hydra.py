"""Support of the fundamental solution on a metric graph ("hydra").

An instantaneous unit impulse injected at a boundary vertex travels with
unit speed.  At an interior vertex of multiplicity m an arriving singularity
of amplitude a splits: a reflected branch of amplitude -a*(m-2)/m returns
into the incoming edge, and each of the other m-1 incident edges receives a
transmitted branch of amplitude 2*a/m.  At a boundary vertex (for t > 0) the
singularity reflects with amplitude -a.  The space-time support of the
resulting solution, truncated at a finite horizon, is a finite union of
slope +-1 segments with rational data; this module builds it event by event.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .graph import (EdgePoint, GraphPoint, MetricGraph, VertexPoint,
                    format_rational, validate_point)

DEFAULT_MAX_EVENTS = 10**6


class EventCapError(RuntimeError):
    """Raised when hydra construction exceeds the configured event budget."""

    def __init__(self, count: int):
        super().__init__(f"hydra construction exceeded the event cap at {count} events")
        self.count = count


class NotOnHydraError(ValueError):
    """Queried space-time point does not belong to the hydra."""


@dataclass(frozen=True)
class SpaceTimePoint:
    point: GraphPoint
    time: Fraction


@dataclass(frozen=True)
class HydraSegment:
    """One moving singularity: over the open s-interval (s_lo, s_hi) of the
    edge, the singularity is at position s at time t(s) = t_ref + slope*s."""

    source: str
    edge: str
    s_lo: Fraction
    s_hi: Fraction
    t_ref: Fraction
    slope: int  # +1 or -1
    amplitude: Fraction
    spawn_vertex: str
    spawn_time: Fraction

    def time_at(self, s: Fraction) -> Fraction:
        return self.t_ref + self.slope * s

    def s_at(self, t: Fraction) -> Fraction:
        return self.slope * (t - self.t_ref)

    @property
    def t_min(self) -> Fraction:
        return min(self.time_at(self.s_lo), self.time_at(self.s_hi))

    @property
    def t_max(self) -> Fraction:
        return max(self.time_at(self.s_lo), self.time_at(self.s_hi))


@dataclass(frozen=True)
class VertexEvent:
    vertex: str
    time: Fraction
    amplitude: Fraction  # total incoming amplitude (1 at the root)


def split_coefficients(m: int) -> tuple[Fraction, Fraction]:
    """(reflected, transmitted) amplitude factors at an interior vertex of
    multiplicity m; they satisfy reflected + (m-1)*transmitted = 1."""
    if m < 3:
        raise ValueError("interior vertices have multiplicity >= 3")
    return -Fraction(m - 2, m), Fraction(2, m)


class Hydra:
    """Truncated hydra of a single source vertex; immutable after build."""

    def __init__(self, graph: MetricGraph, source: str, horizon: Fraction,
                 segments: Iterable[HydraSegment],
                 events: Iterable[VertexEvent]):
        self.graph = graph
        self.source = source
        self.horizon = horizon
        self.segments = tuple(sorted(
            segments,
            key=lambda s: (s.edge, s.s_lo, s.t_ref, s.slope, s.amplitude)))
        self.events = tuple(sorted(events, key=lambda e: (e.time, e.vertex)))
        by_edge: dict[str, list[HydraSegment]] = {}
        for seg in self.segments:
            by_edge.setdefault(seg.edge, []).append(seg)
        self._by_edge = {e: tuple(v) for e, v in by_edge.items()}
        by_vertex: dict[str, list[VertexEvent]] = {}
        for ev in self.events:
            by_vertex.setdefault(ev.vertex, []).append(ev)
        self._by_vertex = {v: tuple(evs) for v, evs in by_vertex.items()}

    def segments_on(self, eid: str) -> tuple[HydraSegment, ...]:
        return self._by_edge.get(eid, ())

    def events_at(self, vid: str) -> tuple[VertexEvent, ...]:
        return self._by_vertex.get(vid, ())

    def rho_fiber(self, t: Fraction) -> frozenset[SpaceTimePoint]:
        """All hydra points at the given time (positions of the fronts)."""
        return _rho_fiber(self.graph, [self], t)

    def pi_fiber(self, x: GraphPoint) -> frozenset[SpaceTimePoint]:
        """All hydra points over the given position."""
        return _pi_fiber(self.graph, [self], x)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Hydra) and self.source == other.source
                and self.horizon == other.horizon
                and self.segments == other.segments
                and self.events == other.events)


def build_hydra(g: MetricGraph, gamma: str, horizon: Fraction,
                max_events: int = DEFAULT_MAX_EVENTS) -> Hydra:
    """Event-driven construction of the truncated hydra rooted at ``gamma``.

    A priority queue of vertex arrivals is processed in time order;
    simultaneous arrivals spawning into the same outgoing edge are merged by
    amplitude addition, and a merged amplitude of zero suppresses the branch
    (the hydra is a support, so silent branches must vanish).
    """
    if not g.vertex(gamma).boundary:
        raise ValueError(f"source {gamma!r} is not a boundary vertex")
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    heap: list[tuple[Fraction, str, str, Fraction]] = [
        (Fraction(0), gamma, "", Fraction(1))]
    segments: list[HydraSegment] = []
    events: list[VertexEvent] = []
    processed = 0
    while heap:
        t, v = heap[0][0], heap[0][1]
        arrivals: dict[str, Fraction] = {}
        total = Fraction(0)
        while heap and heap[0][0] == t and heap[0][1] == v:
            _, _, via, amp = heapq.heappop(heap)
            arrivals[via] = arrivals.get(via, Fraction(0)) + amp
            total += amp
        processed += 1
        if processed > max_events:
            raise EventCapError(processed)
        events.append(VertexEvent(v, t, total))
        if t >= horizon:
            continue
        out: dict[str, Fraction] = {}
        if g.vertex(v).boundary:
            (e0,) = g.incident(v)
            if t == 0 and "" in arrivals:
                out[e0] = Fraction(1)          # emission from the root
            else:
                out[e0] = -total               # boundary reflection
        else:
            refl, trans = split_coefficients(g.degree(v))
            for ein, a in arrivals.items():
                for eout in g.incident(v):
                    coef = refl if eout == ein else trans
                    out[eout] = out.get(eout, Fraction(0)) + a * coef
        for eid in sorted(out):
            amp = out[eid]
            if amp == 0:
                continue
            e = g.edge(eid)
            if v == e.tail:
                slope, t_ref = 1, t
                s_lo = Fraction(0)
                s_hi = min(e.length, horizon - t)
                far = e.head
            else:
                slope, t_ref = -1, t + e.length
                s_hi = e.length
                s_lo = max(Fraction(0), e.length - (horizon - t))
                far = e.tail
            segments.append(HydraSegment(gamma, eid, s_lo, s_hi, t_ref, slope,
                                         amp, v, t))
            if t + e.length <= horizon:
                heapq.heappush(heap, (t + e.length, far, eid, amp))
    return Hydra(g, gamma, horizon, segments, events)


class HydraUnion:
    """Hydras of several sources over a common horizon."""

    def __init__(self, graph: MetricGraph, hydras: dict[str, Hydra]):
        if not hydras:
            raise ValueError("a hydra union needs at least one source")
        horizons = {h.horizon for h in hydras.values()}
        if len(horizons) != 1:
            raise ValueError("all hydras in a union must share the horizon")
        self.graph = graph
        self.horizon = next(iter(horizons))
        self.hydras = {k: hydras[k] for k in sorted(hydras)}

    @property
    def sources(self) -> tuple[str, ...]:
        return tuple(self.hydras)

    def all_segments(self) -> Iterator[HydraSegment]:
        for h in self.hydras.values():
            yield from h.segments

    def pi_fiber(self, x: GraphPoint) -> frozenset[SpaceTimePoint]:
        return _pi_fiber(self.graph, self.hydras.values(), x)

    def rho_fiber(self, t: Fraction) -> frozenset[SpaceTimePoint]:
        return _rho_fiber(self.graph, self.hydras.values(), t)

    def contains(self, p: SpaceTimePoint) -> bool:
        return p in self.pi_fiber(p.point)


def build_union(g: MetricGraph, sigma: Iterable[str], horizon: Fraction,
                max_events: int = DEFAULT_MAX_EVENTS) -> HydraUnion:
    gammas = sorted(set(sigma))
    if not gammas:
        raise ValueError("the source set is empty")
    return HydraUnion(g, {gamma: build_hydra(g, gamma, horizon, max_events)
                          for gamma in gammas})


def _pi_fiber(g: MetricGraph, hydras: Iterable[Hydra],
              x: GraphPoint) -> frozenset[SpaceTimePoint]:
    validate_point(g, x)
    pts: set[SpaceTimePoint] = set()
    if isinstance(x, VertexPoint):
        for h in hydras:
            for ev in h.events_at(x.vertex):
                pts.add(SpaceTimePoint(x, ev.time))
    else:
        for h in hydras:
            for seg in h.segments_on(x.edge):
                if seg.s_lo <= x.s <= seg.s_hi:
                    pts.add(SpaceTimePoint(x, seg.time_at(x.s)))
    return frozenset(pts)


def _rho_fiber(g: MetricGraph, hydras: Iterable[Hydra],
               t: Fraction) -> frozenset[SpaceTimePoint]:
    pts: set[SpaceTimePoint] = set()
    for h in hydras:
        if not (0 <= t <= h.horizon):
            continue
        for seg in h.segments:
            s = seg.s_at(t)
            if seg.s_lo <= s <= seg.s_hi:
                e = g.edge(seg.edge)
                if s == 0:
                    pt: GraphPoint = VertexPoint(e.tail)
                elif s == e.length:
                    pt = VertexPoint(e.head)
                else:
                    pt = EdgePoint(seg.edge, s)
                pts.add(SpaceTimePoint(pt, t))
        for ev in h.events:
            if ev.time == t:
                pts.add(SpaceTimePoint(VertexPoint(ev.vertex), t))
    return frozenset(pts)


def fibers(hu: HydraUnion, query: GraphPoint | Fraction) -> frozenset[SpaceTimePoint]:
    """Space fiber of a position or time fiber of an instant."""
    if isinstance(query, (VertexPoint, EdgePoint)):
        return hu.pi_fiber(query)
    return hu.rho_fiber(Fraction(query))


def heads(h: Hydra, s: Fraction) -> frozenset[GraphPoint]:
    """Front positions of the hydra delayed by s: positions at time T - s."""
    if not (0 <= s <= h.horizon):
        raise ValueError("delay must lie in [0, horizon]")
    return frozenset(p.point for p in h.rho_fiber(h.horizon - s))


def corner_points(hu: HydraUnion) -> frozenset[SpaceTimePoint]:
    """Vertex fibers, same-edge crossings of opposite-slope segments
    (including cross-source crossings), and the top slice t = horizon."""
    pts: set[SpaceTimePoint] = set()
    for h in hu.hydras.values():
        for ev in h.events:
            pts.add(SpaceTimePoint(VertexPoint(ev.vertex), ev.time))
    by_edge: dict[str, list[HydraSegment]] = {}
    for seg in hu.all_segments():
        by_edge.setdefault(seg.edge, []).append(seg)
    for eid, segs in by_edge.items():
        ups = [s for s in segs if s.slope == 1]
        downs = [s for s in segs if s.slope == -1]
        for a in ups:
            for b in downs:
                s_star = (b.t_ref - a.t_ref) / 2
                if max(a.s_lo, b.s_lo) < s_star < min(a.s_hi, b.s_hi):
                    pts.add(SpaceTimePoint(EdgePoint(eid, s_star),
                                           a.time_at(s_star)))
    pts |= hu.rho_fiber(hu.horizon)
    return frozenset(pts)


def amplitude_at(h: Hydra, p: SpaceTimePoint) -> Fraction:
    """Amplitude of the hydra at a space-time point.

    Edge-interior points sum the amplitudes of all branches through the point
    (two at a crossing).  Boundary vertices carry 0 for t > 0 and 1 at the
    root.  At an interior vertex the value is the summed amplitude of the
    branches arriving from the strict past.
    """
    x, t = p.point, p.time
    if isinstance(x, VertexPoint):
        evs = [ev for ev in h.events_at(x.vertex) if ev.time == t]
        if not evs:
            raise NotOnHydraError(f"{p} is not on the hydra of {h.source!r}")
        if h.graph.vertex(x.vertex).boundary:
            if t == 0 and x.vertex == h.source:
                return Fraction(1)
            return Fraction(0)
        return evs[0].amplitude
    validate_point(h.graph, x)
    total = Fraction(0)
    found = False
    for seg in h.segments_on(x.edge):
        if seg.s_lo <= x.s <= seg.s_hi and seg.time_at(x.s) == t:
            total += seg.amplitude
            found = True
    if not found:
        raise NotOnHydraError(f"{p} is not on the hydra of {h.source!r}")
    return total


# -- exports ------------------------------------------------------------------

def _point_key(x: GraphPoint) -> tuple:
    if isinstance(x, VertexPoint):
        return (0, x.vertex, Fraction(0))
    return (1, x.edge, x.s)


def point_to_json(x: GraphPoint) -> dict:
    if isinstance(x, VertexPoint):
        return {"vertex": x.vertex}
    return {"edge": x.edge, "s": format_rational(x.s)}


def hydra_to_json_dict(hu: HydraUnion) -> dict:
    return {
        "horizon": format_rational(hu.horizon),
        "sources": list(hu.sources),
        "segments": [
            {
                "source": seg.source,
                "edge": seg.edge,
                "s_interval": [format_rational(seg.s_lo), format_rational(seg.s_hi)],
                "time_map": {"t_ref": format_rational(seg.t_ref), "slope": seg.slope},
                "amplitude": format_rational(seg.amplitude),
            }
            for h in hu.hydras.values() for seg in h.segments
        ],
        "vertex_events": [
            {"source": h.source, "vertex": ev.vertex,
             "time": format_rational(ev.time),
             "incoming_amplitude": format_rational(ev.amplitude)}
            for h in hu.hydras.values() for ev in h.events
        ],
    }


def hydra_to_dot(hu: HydraUnion) -> str:
    """GraphViz rendering of the space-time graph: segments as edges labeled
    with amplitudes, corner points drawn as filled nodes."""
    corners = corner_points(hu)
    corner_keys = {(_point_key(c.point), c.time) for c in corners}
    nodes: dict[tuple, str] = {}
    lines = ["digraph hydra {", '  rankdir="BT";',
             '  node [shape=circle, fontsize=10];']

    def node_id(pt: GraphPoint, t: Fraction) -> str:
        key = (_point_key(pt), t)
        if key not in nodes:
            nodes[key] = f"n{len(nodes)}"
            if isinstance(pt, VertexPoint):
                label = f"{pt.vertex} @ t={format_rational(t)}"
            else:
                label = f"{pt.edge}:{format_rational(pt.s)} @ t={format_rational(t)}"
            style = ', style=filled, fillcolor=gray80' if key in corner_keys else ""
            lines.append(f'  {nodes[key]} [label="{label}"{style}];')
        return nodes[key]

    def endpoint(seg: HydraSegment, s: Fraction) -> GraphPoint:
        e = hu.graph.edge(seg.edge)
        if s == 0:
            return VertexPoint(e.tail)
        if s == e.length:
            return VertexPoint(e.head)
        return EdgePoint(seg.edge, s)

    for h in hu.hydras.values():
        for seg in h.segments:
            lo_pt = endpoint(seg, seg.s_lo)
            hi_pt = endpoint(seg, seg.s_hi)
            t_lo, t_hi = seg.time_at(seg.s_lo), seg.time_at(seg.s_hi)
            a = node_id(lo_pt, t_lo)
            b = node_id(hi_pt, t_hi)
            src, dst = (a, b) if t_lo <= t_hi else (b, a)
            lines.append(
                f'  {src} -> {dst} [label="{seg.source}: '
                f'{format_rational(seg.amplitude)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
