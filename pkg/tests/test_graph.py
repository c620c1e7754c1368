import json
import random
from fractions import Fraction as F

import pytest

from wavegraph import (EdgePoint, GraphFormatError, Region, VertexPoint,
                       distance, eccentricity, graph_to_json, neighborhood,
                       parse_graph, parse_rational)
from wavegraph.samples import g1_document, g3_document, random_metric_graph


def test_parse_g3_counts():
    g = parse_graph(json.dumps(g3_document()))
    assert len(g.edges) == 3
    assert len(g.interior_ids) == 1
    assert len(g.vertices) == 4
    assert g.boundary_ids == ("g1", "g2", "g3")


def test_parse_g1_counts():
    g = parse_graph(json.dumps(g1_document()))
    assert len(g.edges) == 1
    assert g.interior_ids == ()
    assert len(g.vertices) == 2


def test_roundtrip_is_stable():
    text = graph_to_json(parse_graph(json.dumps(g3_document())))
    assert graph_to_json(parse_graph(text)) == text


def _doc(vertices, edges):
    return json.dumps({"vertices": vertices, "edges": edges})


def test_degree_two_vertex_rejected():
    doc = _doc(
        [{"id": "a", "boundary": True}, {"id": "m", "boundary": False},
         {"id": "b", "boundary": True}],
        [{"id": "e1", "from": "a", "to": "m", "length": "1"},
         {"id": "e2", "from": "m", "to": "b", "length": "1"}])
    with pytest.raises(GraphFormatError, match="multiplicity 2"):
        parse_graph(doc)


def test_self_loop_rejected():
    doc = _doc(
        [{"id": "v", "boundary": False}, {"id": "a", "boundary": True}],
        [{"id": "e1", "from": "v", "to": "v", "length": "1"},
         {"id": "e2", "from": "v", "to": "a", "length": "1"}])
    with pytest.raises(GraphFormatError, match="self-loop"):
        parse_graph(doc)


def test_disconnected_rejected():
    doc = _doc(
        [{"id": "a", "boundary": True}, {"id": "b", "boundary": True},
         {"id": "c", "boundary": True}, {"id": "d", "boundary": True}],
        [{"id": "e1", "from": "a", "to": "b", "length": "1"},
         {"id": "e2", "from": "c", "to": "d", "length": "1"}])
    with pytest.raises(GraphFormatError, match="not connected"):
        parse_graph(doc)


def test_bad_length_rejected():
    base = [{"id": "a", "boundary": True}, {"id": "b", "boundary": True}]
    with pytest.raises(GraphFormatError, match="non-positive"):
        parse_graph(_doc(base, [{"id": "e", "from": "a", "to": "b", "length": "0"}]))
    with pytest.raises(GraphFormatError, match="not a rational"):
        parse_graph(_doc(base, [{"id": "e", "from": "a", "to": "b", "length": "1.5"}]))


def test_boundary_flag_must_match_degree():
    doc = _doc(
        [{"id": "v", "boundary": True}, {"id": "a", "boundary": True},
         {"id": "b", "boundary": True}, {"id": "c", "boundary": True}],
        [{"id": "e1", "from": "v", "to": "a", "length": "1"},
         {"id": "e2", "from": "v", "to": "b", "length": "1"},
         {"id": "e3", "from": "v", "to": "c", "length": "1"}])
    with pytest.raises(GraphFormatError, match="boundary vertex 'v'"):
        parse_graph(doc)


def test_not_json_rejected():
    with pytest.raises(GraphFormatError, match="not valid JSON"):
        parse_graph("{nope")


def test_parse_rational():
    assert parse_rational("3/4") == F(3, 4)
    assert parse_rational("2") == F(2)
    with pytest.raises(GraphFormatError):
        parse_rational("3/0")


def test_distance_examples(G1, G3):
    assert distance(G3, VertexPoint("g1"), VertexPoint("g2")) == 2
    # a point at distance 1/4 from g1 sits at s = 3/4 on e1 (e1 runs v -> g1)
    assert distance(G3, EdgePoint("e1", F(3, 4)), VertexPoint("g1")) == F(1, 4)
    assert distance(G1, VertexPoint("g"), VertexPoint("gp")) == 1


def test_neighborhood_examples(G1, G3):
    r = neighborhood(G1, [VertexPoint("g")], F(1, 2))
    assert r.on_edge("e") == ((F(0), F(1, 2)),)
    assert r.vertices == frozenset({"g"})

    r3 = neighborhood(G3, [VertexPoint("g1")], F(3, 2))
    assert r3.on_edge("e1") == ((F(0), F(1)),)
    assert r3.on_edge("e2") == ((F(0), F(1, 2)),)
    assert r3.on_edge("e3") == ((F(0), F(1, 2)),)
    assert r3.vertices == frozenset({"g1", "v"})

    assert neighborhood(G3, [VertexPoint("g1")], F(0)).is_empty


def _random_point(rng, g):
    if rng.random() < 0.3:
        return VertexPoint(rng.choice([v.id for v in g.vertices]))
    e = rng.choice(g.edges)
    den = rng.randint(2, 9)
    return EdgePoint(e.id, e.length * F(rng.randint(1, den - 1), den))


def test_distance_is_a_metric(G1, G3):
    rng = random.Random(5)
    graphs = [G1, G3, random_metric_graph(random.Random(99))]
    for g in graphs:
        pts = [_random_point(rng, g) for _ in range(8)]
        for x in pts:
            assert distance(g, x, x) == 0
            for y in pts:
                dxy = distance(g, x, y)
                assert dxy == distance(g, y, x)
                assert (dxy == 0) == (x == y)
                for z in pts:
                    assert dxy <= distance(g, x, z) + distance(g, z, y)


def test_same_edge_distance_direct_or_around(G3):
    # whichever of the straight run and the around-path is shorter wins
    x, y = EdgePoint("e1", F(1, 4)), EdgePoint("e1", F(3, 4))
    assert distance(G3, x, y) == F(1, 2)


def test_around_path_on_parallel_edges():
    doc = {"vertices": [{"id": "v1", "boundary": False},
                        {"id": "v2", "boundary": False},
                        {"id": "a", "boundary": True},
                        {"id": "b", "boundary": True}],
           "edges": [{"id": "p1", "from": "v1", "to": "v2", "length": "1/4"},
                     {"id": "p2", "from": "v1", "to": "v2", "length": "2"},
                     {"id": "e1", "from": "v1", "to": "a", "length": "1"},
                     {"id": "e2", "from": "v2", "to": "b", "length": "1"}]}
    g = parse_graph(json.dumps(doc))
    # points on the long parallel edge reach each other around the short one
    x, y = EdgePoint("p2", F(1, 8)), EdgePoint("p2", F(15, 8))
    assert distance(g, x, y) == F(1, 8) + F(1, 4) + F(1, 8)


def test_neighborhood_monotone_in_radius(G3, small_graphs):
    rng = random.Random(11)
    for g, horizon in [(G3, F(3, 2))] + small_graphs[:4]:
        srcs = [VertexPoint(g.boundary_ids[0])]
        r1 = horizon * F(1, 3)
        r2 = horizon
        small = neighborhood(g, srcs, r1)
        big = neighborhood(g, srcs, r2)
        assert big.covers(small)


def test_region_contains(G3):
    r3 = neighborhood(G3, [VertexPoint("g1")], F(3, 2))
    assert r3.contains(EdgePoint("e2", F(1, 4)))
    assert not r3.contains(EdgePoint("e2", F(3, 4)))
    assert r3.contains(VertexPoint("v"))
    assert not r3.contains(VertexPoint("g2"))


def test_eccentricity(G1, G3):
    assert eccentricity(G1, "g") == 1
    assert eccentricity(G3, "g1") == 2
