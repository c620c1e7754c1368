"""Exact model of a finite compact metric graph.

A graph document lists vertices (each either boundary or interior) and
oriented edges with positive rational lengths.  Every edge carries a fixed
parametrization running from its ``tail`` vertex (s = 0) to its ``head``
vertex (s = length); all coordinates, lengths and distances are
``fractions.Fraction`` values so that every derived quantity stays exact.

Structural rules: the graph is connected, has no self-loops, no vertex of
multiplicity 2 (such a vertex is indistinguishable from an edge interior
point), boundary vertices have multiplicity exactly 1 and interior vertices
multiplicity >= 3.  Parallel edges are allowed.
"""

from __future__ import annotations

import heapq
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class GraphFormatError(ValueError):
    """A graph document violates the input contract."""


_RATIONAL_RE = re.compile(r"^-?\d+(/[1-9]\d*)?$")


def parse_rational(raw: object) -> Fraction:
    """Parse a rational written as ``"p/q"`` or ``"n"`` (Fractions and ints
    pass through)."""
    if isinstance(raw, bool):
        raise GraphFormatError(f"not a rational number: {raw!r}")
    if isinstance(raw, (int, Fraction)):
        return Fraction(raw)
    if isinstance(raw, str) and _RATIONAL_RE.match(raw.strip()):
        return Fraction(raw.strip())
    raise GraphFormatError(f"not a rational 'p/q' or integer string: {raw!r}")


def format_rational(q: Fraction) -> str:
    return str(q)


@dataclass(frozen=True)
class Vertex:
    id: str
    boundary: bool


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: Fraction


@dataclass(frozen=True)
class VertexPoint:
    vertex: str


@dataclass(frozen=True)
class EdgePoint:
    edge: str
    s: Fraction


GraphPoint = VertexPoint | EdgePoint


class MetricGraph:
    """Validated metric graph with precomputed vertex-to-vertex distances.

    Instances are immutable after construction and safe to share.
    """

    def __init__(self, vertices: Sequence[Vertex], edges: Sequence[Edge]):
        self.vertices = tuple(vertices)
        self.edges = tuple(edges)
        self._vertex_by_id = {}
        for v in self.vertices:
            if v.id in self._vertex_by_id:
                raise GraphFormatError(f"duplicate vertex id {v.id!r}")
            self._vertex_by_id[v.id] = v
        self._edge_by_id = {}
        incident: dict[str, list[str]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            if e.id in self._edge_by_id:
                raise GraphFormatError(f"duplicate edge id {e.id!r}")
            for end in (e.tail, e.head):
                if end not in self._vertex_by_id:
                    raise GraphFormatError(
                        f"edge {e.id!r} references unknown vertex {end!r}")
            if e.tail == e.head:
                raise GraphFormatError(
                    f"edge {e.id!r} is a self-loop; self-loops are not supported")
            if e.length <= 0:
                raise GraphFormatError(f"edge {e.id!r} has non-positive length")
            self._edge_by_id[e.id] = e
            incident[e.tail].append(e.id)
            incident[e.head].append(e.id)
        self._incident = {v: tuple(sorted(eids)) for v, eids in incident.items()}
        if not self.vertices:
            raise GraphFormatError("graph has no vertices")
        if not self.edges:
            raise GraphFormatError("graph has no edges")
        self._check_connected()
        for v in self.vertices:
            m = len(self._incident[v.id])
            if m == 2:
                raise GraphFormatError(
                    f"vertex {v.id!r} has multiplicity 2; "
                    "multiplicity-2 vertices are not supported (merge the two edges)")
            if v.boundary and m != 1:
                raise GraphFormatError(
                    f"boundary vertex {v.id!r} has multiplicity {m}, expected 1")
            if not v.boundary and m == 1:
                raise GraphFormatError(
                    f"vertex {v.id!r} has multiplicity 1 but is not marked boundary")
        self._vdist = {v.id: self._dijkstra(v.id) for v in self.vertices}

    def _check_connected(self) -> None:
        start = self.vertices[0].id
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for eid in self._incident[v]:
                e = self._edge_by_id[eid]
                w = e.head if e.tail == v else e.tail
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(self.vertices):
            raise GraphFormatError("graph is not connected")

    def _dijkstra(self, source: str) -> dict[str, Fraction]:
        dist = {source: Fraction(0)}
        heap = [(Fraction(0), source)]
        while heap:
            d, v = heapq.heappop(heap)
            if d > dist.get(v, d):
                continue
            for eid in self._incident[v]:
                e = self._edge_by_id[eid]
                w = e.head if e.tail == v else e.tail
                nd = d + e.length
                if w not in dist or nd < dist[w]:
                    dist[w] = nd
                    heapq.heappush(heap, (nd, w))
        return dist

    # -- accessors ---------------------------------------------------------

    def vertex(self, vid: str) -> Vertex:
        try:
            return self._vertex_by_id[vid]
        except KeyError:
            raise GraphFormatError(f"unknown vertex {vid!r}") from None

    def edge(self, eid: str) -> Edge:
        try:
            return self._edge_by_id[eid]
        except KeyError:
            raise GraphFormatError(f"unknown edge {eid!r}") from None

    def incident(self, vid: str) -> tuple[str, ...]:
        return self._incident[vid]

    def degree(self, vid: str) -> int:
        return len(self._incident[vid])

    @property
    def boundary_ids(self) -> tuple[str, ...]:
        return tuple(sorted(v.id for v in self.vertices if v.boundary))

    @property
    def interior_ids(self) -> tuple[str, ...]:
        return tuple(sorted(v.id for v in self.vertices if not v.boundary))

    @property
    def total_length(self) -> Fraction:
        return sum((e.length for e in self.edges), Fraction(0))

    def vertex_distance(self, a: str, b: str) -> Fraction:
        return self._vdist[a][b]

    def __repr__(self) -> str:
        return (f"MetricGraph(p={len(self.edges)}, q={len(self.interior_ids)}, "
                f"n={len(self.vertices)})")


# -- document I/O -----------------------------------------------------------

def graph_from_dict(doc: Mapping) -> MetricGraph:
    if not isinstance(doc, Mapping):
        raise GraphFormatError("document root must be an object")
    for key in ("vertices", "edges"):
        if key not in doc or not isinstance(doc[key], list):
            raise GraphFormatError(f"document is missing the {key!r} list")
    vertices = []
    for item in doc["vertices"]:
        try:
            vid, boundary = item["id"], item["boundary"]
        except (TypeError, KeyError) as exc:
            raise GraphFormatError(f"malformed vertex entry: {item!r}") from exc
        if not isinstance(vid, str) or not isinstance(boundary, bool):
            raise GraphFormatError(f"malformed vertex entry: {item!r}")
        vertices.append(Vertex(vid, boundary))
    edges = []
    for item in doc["edges"]:
        try:
            eid, tail, head, raw_len = item["id"], item["from"], item["to"], item["length"]
        except (TypeError, KeyError) as exc:
            raise GraphFormatError(f"malformed edge entry: {item!r}") from exc
        if not all(isinstance(x, str) for x in (eid, tail, head)):
            raise GraphFormatError(f"malformed edge entry: {item!r}")
        edges.append(Edge(eid, tail, head, parse_rational(raw_len)))
    return MetricGraph(vertices, edges)


def parse_graph(text: str) -> MetricGraph:
    """Parse a JSON graph document; raises GraphFormatError with a distinct
    diagnostic for each class of malformation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"document is not valid JSON: {exc}") from exc
    return graph_from_dict(doc)


def graph_to_dict(g: MetricGraph) -> dict:
    return {
        "vertices": [{"id": v.id, "boundary": v.boundary} for v in g.vertices],
        "edges": [{"id": e.id, "from": e.tail, "to": e.head,
                   "length": format_rational(e.length)} for e in g.edges],
    }


def graph_to_json(g: MetricGraph) -> str:
    return json.dumps(graph_to_dict(g), indent=2)


# -- points and distance -----------------------------------------------------

def validate_point(g: MetricGraph, p: GraphPoint) -> None:
    if isinstance(p, VertexPoint):
        g.vertex(p.vertex)
    elif isinstance(p, EdgePoint):
        e = g.edge(p.edge)
        if not (0 < p.s < e.length):
            raise GraphFormatError(
                f"edge point s={p.s} is outside the open interval (0, {e.length}) "
                f"of edge {p.edge!r}")
    else:
        raise GraphFormatError(f"not a graph point: {p!r}")


def _anchors(g: MetricGraph, p: GraphPoint) -> list[tuple[str, Fraction]]:
    if isinstance(p, VertexPoint):
        return [(p.vertex, Fraction(0))]
    e = g.edge(p.edge)
    return [(e.tail, p.s), (e.head, e.length - p.s)]


def distance(g: MetricGraph, x: GraphPoint, y: GraphPoint) -> Fraction:
    """Exact shortest-path distance between two points of the graph."""
    validate_point(g, x)
    validate_point(g, y)
    best: Fraction | None = None
    if isinstance(x, EdgePoint) and isinstance(y, EdgePoint) and x.edge == y.edge:
        best = abs(x.s - y.s)
    for va, da in _anchors(g, x):
        for vb, db in _anchors(g, y):
            cand = da + g.vertex_distance(va, vb) + db
            if best is None or cand < best:
                best = cand
    assert best is not None
    return best


# -- regions ------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """Open subset of the graph: per-edge disjoint open intervals plus a
    vertex set.  Interval lists are sorted and strictly disjoint."""

    intervals: tuple[tuple[str, tuple[tuple[Fraction, Fraction], ...]], ...]
    vertices: frozenset[str]

    @staticmethod
    def build(per_edge: Mapping[str, Sequence[tuple[Fraction, Fraction]]],
              vertices: Iterable[str]) -> "Region":
        items = []
        for eid in sorted(per_edge):
            ivs = tuple(sorted(per_edge[eid]))
            if ivs:
                items.append((eid, ivs))
        return Region(tuple(items), frozenset(vertices))

    def on_edge(self, eid: str) -> tuple[tuple[Fraction, Fraction], ...]:
        for e, ivs in self.intervals:
            if e == eid:
                return ivs
        return ()

    @property
    def is_empty(self) -> bool:
        return not self.intervals and not self.vertices

    def total_length(self) -> Fraction:
        return sum((hi - lo for _, ivs in self.intervals for lo, hi in ivs),
                   Fraction(0))

    def contains(self, p: GraphPoint) -> bool:
        if isinstance(p, VertexPoint):
            return p.vertex in self.vertices
        return any(lo < p.s < hi for lo, hi in self.on_edge(p.edge))

    def covers(self, other: "Region") -> bool:
        """True when ``other`` is a subset of this region."""
        if not other.vertices <= self.vertices:
            return False
        for eid, ivs in other.intervals:
            mine = self.on_edge(eid)
            for lo, hi in ivs:
                if not any(a <= lo and hi <= b for a, b in mine):
                    return False
        return True


def _merge_open_intervals(raw: list[tuple[Fraction, Fraction]],
                          touch_covered) -> list[tuple[Fraction, Fraction]]:
    """Union of open intervals; two intervals touching at a point are merged
    only when ``touch_covered(point)`` says the point itself belongs."""
    ivs = sorted((lo, hi) for lo, hi in raw if lo < hi)
    out: list[tuple[Fraction, Fraction]] = []
    for lo, hi in ivs:
        if out:
            plo, phi = out[-1]
            if lo < phi or (lo == phi and touch_covered(lo)):
                if hi > phi:
                    out[-1] = (plo, hi)
                continue
        out.append((lo, hi))
    return out


def neighborhood(g: MetricGraph, sources: Iterable[GraphPoint],
                 radius: Fraction) -> Region:
    """Exact open metric neighborhood { x : dist(x, sources) < radius }."""
    srcs = list(sources)
    for p in srcs:
        validate_point(g, p)
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    if radius == 0 or not srcs:
        return Region.build({}, ())
    # Multi-source Dijkstra on the vertex skeleton.
    dist: dict[str, Fraction] = {}
    heap: list[tuple[Fraction, str]] = []
    by_edge: dict[str, list[Fraction]] = {}
    for p in srcs:
        if isinstance(p, VertexPoint):
            seeds = [(p.vertex, Fraction(0))]
        else:
            e = g.edge(p.edge)
            by_edge.setdefault(p.edge, []).append(p.s)
            seeds = [(e.tail, p.s), (e.head, e.length - p.s)]
        for v, d in seeds:
            if v not in dist or d < dist[v]:
                dist[v] = d
                heapq.heappush(heap, (d, v))
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist.get(v, d):
            continue
        for eid in g.incident(v):
            e = g.edge(eid)
            w = e.head if e.tail == v else e.tail
            nd = d + e.length
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))

    def point_dist(eid: str, s: Fraction) -> Fraction:
        e = g.edge(eid)
        cands = [dist.get(e.tail, None), dist.get(e.head, None)]
        best = None
        if cands[0] is not None:
            best = cands[0] + s
        if cands[1] is not None:
            alt = cands[1] + e.length - s
            best = alt if best is None or alt < best else best
        for s0 in by_edge.get(eid, ()):
            alt = abs(s - s0)
            best = alt if best is None or alt < best else best
        return best if best is not None else radius  # unreachable: not < radius

    per_edge: dict[str, list[tuple[Fraction, Fraction]]] = {}
    for e in g.edges:
        raw: list[tuple[Fraction, Fraction]] = []
        dt = dist.get(e.tail)
        if dt is not None and radius > dt:
            raw.append((Fraction(0), min(e.length, radius - dt)))
        dh = dist.get(e.head)
        if dh is not None and radius > dh:
            raw.append((max(Fraction(0), e.length - (radius - dh)), e.length))
        for s0 in by_edge.get(e.id, ()):
            raw.append((max(Fraction(0), s0 - radius),
                        min(e.length, s0 + radius)))
        merged = _merge_open_intervals(
            raw, lambda pt, eid=e.id: point_dist(eid, pt) < radius)
        if merged:
            per_edge[e.id] = merged
    verts = [v.id for v in g.vertices
             if v.id in dist and dist[v.id] < radius]
    return Region.build(per_edge, verts)


def eccentricity(g: MetricGraph, vid: str) -> Fraction:
    """Largest distance from the vertex to any point of the graph."""
    g.vertex(vid)
    best = max(g.vertex_distance(vid, w.id) for w in g.vertices)
    for e in g.edges:
        da = g.vertex_distance(vid, e.tail)
        db = g.vertex_distance(vid, e.head)
        # max over the edge of min(da + s, db + length - s)
        cand = min((da + db + e.length) / 2, min(da, db) + e.length)
        if cand > best:
            best = cand
    return best
