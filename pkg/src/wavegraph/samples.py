"""Built-in example graphs and a generator of random small graphs.

g1: a single unit string between two boundary vertices "g" and "gp".
g3: a symmetric 3-star with center "v" and unit edges e1, e2, e3 running
from the center to the boundary vertices "g1", "g2", "g3".
"""

from __future__ import annotations

import random
from fractions import Fraction

from .graph import MetricGraph, graph_from_dict


def g1_document() -> dict:
    return {
        "vertices": [
            {"id": "g", "boundary": True},
            {"id": "gp", "boundary": True},
        ],
        "edges": [
            {"id": "e", "from": "g", "to": "gp", "length": "1"},
        ],
    }


def g3_document() -> dict:
    return {
        "vertices": [
            {"id": "v", "boundary": False},
            {"id": "g1", "boundary": True},
            {"id": "g2", "boundary": True},
            {"id": "g3", "boundary": True},
        ],
        "edges": [
            {"id": "e1", "from": "v", "to": "g1", "length": "1"},
            {"id": "e2", "from": "v", "to": "g2", "length": "1"},
            {"id": "e3", "from": "v", "to": "g3", "length": "1"},
        ],
    }


def g1() -> MetricGraph:
    return graph_from_dict(g1_document())


def g3() -> MetricGraph:
    return graph_from_dict(g3_document())


def random_length(rng: random.Random, max_den: int = 8) -> Fraction:
    # lengths on a coarse dyadic lattice: critical points then live on a
    # comparably coarse lattice, keeping cell counts (and exact linear
    # algebra on family matrices) manageable
    den = rng.choice([d for d in (1, 2, 4) if d <= max_den])
    return Fraction(rng.randint(1, 2 * den), den)


def random_metric_graph(rng: random.Random, max_den: int = 8) -> MetricGraph:
    """Random valid small graph (at most 5 edges): a single string, a star,
    or two interior vertices joined by parallel bridges with boundary
    pendants.  Lengths are rationals with numerator and denominator <= max_den."""
    shape = rng.choice(["string", "star", "star", "bridge", "bridge"])
    vertices: list[dict] = []
    edges: list[dict] = []

    def add_edge(tail: str, head: str) -> None:
        edges.append({"id": f"e{len(edges) + 1}", "from": tail, "to": head,
                      "length": str(random_length(rng, max_den))})

    if shape == "string":
        vertices = [{"id": "a", "boundary": True}, {"id": "b", "boundary": True}]
        add_edge("a", "b")
    elif shape == "star":
        m = rng.randint(3, 5)
        vertices.append({"id": "v", "boundary": False})
        for k in range(1, m + 1):
            vertices.append({"id": f"b{k}", "boundary": True})
            add_edge("v", f"b{k}")
    else:
        # Two interior vertices with `bridges` parallel edges between them
        # and enough boundary pendants to reach multiplicity 3.
        options = [(1, 2, 2), (2, 1, 1), (2, 1, 2), (3, 1, 1), (2, 2, 1)]
        bridges, k1, k2 = rng.choice(options)
        vertices.append({"id": "v1", "boundary": False})
        vertices.append({"id": "v2", "boundary": False})
        for _ in range(bridges):
            add_edge("v1", "v2")
        n = 0
        for _ in range(k1):
            n += 1
            vertices.append({"id": f"b{n}", "boundary": True})
            add_edge("v1", f"b{n}")
        for _ in range(k2):
            n += 1
            vertices.append({"id": f"b{n}", "boundary": True})
            add_edge("v2", f"b{n}")
    return graph_from_dict({"vertices": vertices, "edges": edges})


def random_horizon(rng: random.Random, g: MetricGraph,
                   max_den: int = 8) -> Fraction:
    """Random horizon up to slightly past the graph diameter, additionally
    capped at a few traversals of the shortest edge so that the number of
    reflection events stays small."""
    diam = max(g.vertex_distance(a.id, b.id)
               for a in g.vertices for b in g.vertices)
    if diam == 0:
        diam = g.total_length
    shortest = min(e.length for e in g.edges)
    cap = min(diam * Fraction(rng.randint(2, 7), 6),
              shortest * Fraction(rng.randint(4, 10), 3))
    horizon = Fraction(round(cap * max_den), max_den)
    return horizon if horizon > 0 else cap
