import random
from fractions import Fraction as F

import pytest

from wavegraph import (Control, EdgePoint, SampledFunction, VertexPoint,
                       build_partition, build_union, evaluate_wave, hat,
                       is_reachable, neighborhood, represent_on_family,
                       wave_snapshot)
from wavegraph.eikonal import amplitude_vectors, exact_rank
from wavegraph.wave import snapshot_csv


def ramp(gamma, horizon):
    return Control.single(gamma, [(F(0), F(0)), (horizon, horizon)])


def test_point_value_g1(G1):
    hu = build_union(G1, ["g"], F(1, 2))
    u = evaluate_wave(hu, ramp("g", F(1, 2)), EdgePoint("e", F(1, 4)), F(1, 2))
    assert u == F(1, 4)


def test_point_value_g3_transmitted(G3):
    hu = build_union(G3, ["g1"], F(3, 2))
    one = Control.single("g1", [(F(0), F(1)), (F(3, 2), F(1))])
    u = evaluate_wave(hu, one, EdgePoint("e2", F(1, 4)), F(3, 2))
    assert u == F(2, 3)


def test_zero_outside_influence_cone(G3):
    hu = build_union(G3, ["g1"], F(3, 2))
    one = Control.single("g1", [(F(0), F(1)), (F(3, 2), F(1))])
    # point at distance 7/4 from g1, queried at time 3/2
    assert evaluate_wave(hu, one, EdgePoint("e2", F(3, 4)), F(3, 2)) == 0


def test_boundary_values_follow_the_control(G1):
    hu = build_union(G1, ["g"], F(3, 4))
    ctrl = ramp("g", F(3, 4))
    assert evaluate_wave(hu, ctrl, VertexPoint("g"), F(1, 2)) == F(1, 2)
    assert evaluate_wave(hu, ctrl, VertexPoint("gp"), F(1, 2)) == 0


def test_interior_vertex_value_by_continuity(G3):
    hu = build_union(G3, ["g1"], F(3, 2))
    ctrl = ramp("g1", F(3, 2))
    # at time 1 + dt the vertex value is the transmitted (2/3) one
    got = evaluate_wave(hu, ctrl, VertexPoint("v"), F(5, 4))
    assert got == F(2, 3) * F(1, 4)


def test_linearity(G1):
    hu = build_union(G1, ["g", "gp"], F(3, 4))
    c1 = Control.from_dict({"g": [{"t": 0, "value": 0},
                                  {"t": "1/2", "value": "1/3"},
                                  {"t": "3/4", "value": 0}]})
    c2 = Control.from_dict({"gp": [{"t": 0, "value": 0},
                                   {"t": "1/4", "value": "1/5"},
                                   {"t": "3/4", "value": "1/2"}]})
    both = Control.from_dict({**c1.to_dict(), **c2.to_dict()})
    rng = random.Random(2)
    for _ in range(12):
        x = EdgePoint("e", F(rng.randint(1, 15), 16))
        t = F(rng.randint(0, 12), 16)
        assert (evaluate_wave(hu, both, x, t)
                == evaluate_wave(hu, c1, x, t) + evaluate_wave(hu, c2, x, t))


def test_snapshot_zero_control(G3):
    hu = build_union(G3, ["g1"], F(1))
    zero = Control.single("g1", [(F(0), F(0))])
    snap = wave_snapshot(hu, zero, F(1), F(1, 8))
    assert snap.max_abs() == 0.0


def test_snapshot_delay_property(G1):
    hu = build_union(G1, ["g"], F(3, 2))
    base = Control.single("g", hat(F(1, 4), F(1, 4)))
    s = F(1, 2)
    delayed = Control.single("g", [(t + s, v) for t, v in hat(F(1, 4), F(1, 4))])
    for t in (F(3, 4), F(1), F(5, 4)):
        a = wave_snapshot(hu, delayed, t, F(1, 16))
        b = wave_snapshot(hu, base, t - s, F(1, 16))
        assert a.values == b.values


def test_snapshot_transport_reverses_profile(G1):
    hu = build_union(G1, ["g"], F(1, 2))
    ctrl = Control.single("g", hat(F(1, 4), F(1, 4)))
    snap = wave_snapshot(hu, ctrl, F(1, 2), F(1, 16))
    profile = ctrl.value
    for k, val in enumerate(snap.values["e"]):
        s = snap.midpoint("e", k).s
        assert val == profile("g", F(1, 2) - s)


def test_snapshot_vanishes_outside_neighborhood(G3, small_graphs):
    rng = random.Random(8)
    for g, horizon in [(G3, F(3, 2))] + small_graphs[:3]:
        sigma = list(g.boundary_ids)[:2]
        hu = build_union(g, sigma, horizon)
        ctrl = Control.from_dict({
            gamma: [{"t": 0, "value": 0},
                    {"t": horizon / 2, "value": F(rng.randint(1, 5), 3)},
                    {"t": horizon, "value": F(rng.randint(-5, 5), 4)}]
            for gamma in sigma})
        t = horizon * F(2, 3)
        snap = wave_snapshot(hu, ctrl, t, F(1, 24))
        region = neighborhood(g, [VertexPoint(s) for s in sigma], t)
        assert snap.vanishes_outside(region)


def test_represent_on_family(G3):
    part = build_partition(build_union(G3, ["g1"], F(3, 2)))
    fam = next(f for f in part.families if f.size == 3)
    h = F(1, 8)
    n = int(fam.delta / h)
    one, zero = [F(1)] * n, [F(0)] * n
    y = represent_on_family(fam, "g1", [one, zero], h, G3)
    for m, cell in enumerate(fam.cells):
        expect = (F(1), F(0), F(0))[m]
        for k in range(len(y.values[cell.edge])):
            s = y.midpoint(cell.edge, k).s
            if cell.lo < s < cell.hi:
                assert y.values[cell.edge][k] == expect

    y2 = represent_on_family(fam, "g1", [zero, [F(3)] * n], h, G3)
    got = {m: y2.values[c.edge][int(c.lo / h)] for m, c in enumerate(fam.cells)}
    assert got == {0: F(-1), 1: F(2), 2: F(2)}

    y3 = represent_on_family(fam, "g1", [zero, zero], h, G3)
    assert y3.max_abs() == 0.0


def test_snapshots_are_reachable(G1, G3):
    rng = random.Random(13)
    for g, sigma, horizon in ((G1, ["g"], F(3, 4)), (G3, ["g1", "g2"], F(3, 2))):
        hu = build_union(g, sigma, horizon)
        part = build_partition(hu)
        ctrl = Control.from_dict({
            gamma: [{"t": 0, "value": 0},
                    {"t": horizon / 3, "value": F(rng.randint(-6, 6), 5)},
                    {"t": horizon, "value": F(rng.randint(-6, 6), 7)}]
            for gamma in sigma})
        snap = wave_snapshot(hu, ctrl, horizon, horizon / 48)
        rep = is_reachable(part, sigma, snap, tol=1e-9)
        assert rep.reachable, rep.residual


def test_orthogonal_pattern_not_reachable(G3):
    part = build_partition(build_union(G3, ["g1"], F(3, 2)))
    fam = next(f for f in part.families if f.size == 3)
    h = F(1, 8)
    y = SampledFunction.zeros(G3, h)
    signs = {0: F(0), 1: F(1), 2: F(-1)}  # orthogonal to both amplitude vectors
    for m, cell in enumerate(fam.cells):
        for k in range(len(y.values[cell.edge])):
            if cell.lo < y.midpoint(cell.edge, k).s < cell.hi:
                y.values[cell.edge][k] = signs[m]
    rep = is_reachable(part, ["g1"], y, tol=1e-9)
    assert not rep.reachable
    assert rep.residual > 0.99


def test_unreachable_outside_region(G3):
    part = build_partition(build_union(G3, ["g1"], F(3, 2)))
    y = SampledFunction.zeros(G3, F(1, 8))
    y.values["e2"][-1] = F(1)  # next to g2, outside the filled region
    rep = is_reachable(part, ["g1"], y, tol=1e-9)
    assert not rep.reachable
    assert rep.residual == pytest.approx(1.0)


def test_snapshot_values_lie_in_amplitude_span(G3):
    hu = build_union(G3, ["g1"], F(3, 2))
    part = build_partition(hu)
    fam = next(f for f in part.families if f.size == 3)
    ctrl = Control.single("g1", hat(F(1, 2), F(1, 2)))
    vectors = amplitude_vectors(fam, "g1")
    base_rank = exact_rank(vectors)
    for r in (F(1, 8), F(1, 4), F(3, 8)):
        sample = tuple(
            evaluate_wave(hu, ctrl, cell.point_at(r), F(3, 2))
            for cell in fam.cells)
        assert exact_rank(list(vectors) + [sample]) == base_rank


def test_snapshot_csv_format(G1):
    hu = build_union(G1, ["g"], F(1, 2))
    snap = wave_snapshot(hu, ramp("g", F(1, 2)), F(1, 2), F(1, 4))
    text = snapshot_csv(snap)
    lines = text.strip().splitlines()
    assert lines[0] == "edge,s,value"
    assert len(lines) == 1 + 4
