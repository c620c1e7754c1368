import random
from fractions import Fraction as F

import pytest

from wavegraph import (EdgePoint, SpaceTimePoint, VertexPoint, build_partition,
                       build_union, critical_points, determination_set,
                       distance, lattice_closure, neighborhood, tau_functions)
from wavegraph.lattice import AffineMap


def stp(edge, s, t):
    return SpaceTimePoint(EdgePoint(edge, F(s)), F(t))


def test_closure_g1_seed(G1):
    hu = build_union(G1, ["g"], F(3, 2))
    got = lattice_closure(hu, [stp("e", F(1, 2), F(3, 2))])
    assert got == frozenset({stp("e", F(1, 2), F(3, 2)),
                             stp("e", F(1, 2), F(1, 2))})


def test_closure_root_is_fixed(G1):
    hu = build_union(G1, ["g"], F(3, 2))
    root = SpaceTimePoint(VertexPoint("g"), F(0))
    assert lattice_closure(hu, [root]) == frozenset({root})


def test_closure_two_sources(G1):
    hu = build_union(G1, ["g", "gp"], F(3, 4))
    got = lattice_closure(hu, [stp("e", F(3, 4), F(3, 4))])
    assert got == frozenset({
        stp("e", F(3, 4), F(3, 4)), stp("e", F(3, 4), F(1, 4)),
        stp("e", F(1, 4), F(1, 4)), stp("e", F(1, 4), F(3, 4))})


def test_closure_rejects_off_hydra_seed(G1):
    hu = build_union(G1, ["g"], F(3, 2))
    with pytest.raises(ValueError, match="does not lie on the hydra"):
        lattice_closure(hu, [stp("e", F(1, 2), F(1, 4))])


def _hydra_sample_points(hu, rng, count):
    pts = []
    segs = list(hu.all_segments())
    for _ in range(count):
        seg = rng.choice(segs)
        den = rng.randint(2, 5)
        s = seg.s_lo + (seg.s_hi - seg.s_lo) * F(rng.randint(1, den - 1), den)
        pts.append(SpaceTimePoint(EdgePoint(seg.edge, s), seg.time_at(s)))
    return pts


def test_kuratowski_axioms(G1, G3, small_graphs):
    rng = random.Random(17)
    cases = [(G1, F(3, 2)), (G3, F(3, 2))] + small_graphs[:4]
    for g, horizon in cases:
        hu = build_union(g, list(g.boundary_ids)[:2], horizon)
        b1 = _hydra_sample_points(hu, rng, 2)
        b2 = _hydra_sample_points(hu, rng, 2)
        c1 = lattice_closure(hu, b1)
        c2 = lattice_closure(hu, b2)
        assert c1 >= set(b1)                              # extensive
        assert lattice_closure(hu, c1) == c1              # idempotent
        assert lattice_closure(hu, b1 + b2) == c1 | c2    # additive


def test_critical_points_examples(G1, G3):
    hu = build_union(G1, ["g"], F(3, 2))
    assert critical_points(hu) == frozenset({
        VertexPoint("g"), VertexPoint("gp"), EdgePoint("e", F(1, 2))})

    hu_small = build_union(G1, ["g"], F(1, 2))
    assert critical_points(hu_small) == frozenset({
        VertexPoint("g"), EdgePoint("e", F(1, 2))})

    hu3 = build_union(G3, ["g1"], F(3, 2))
    assert critical_points(hu3) == frozenset({
        VertexPoint("g1"), VertexPoint("v"), EdgePoint("e1", F(1, 2)),
        EdgePoint("e2", F(1, 2)), EdgePoint("e3", F(1, 2))})


def test_partition_g3(G3):
    part = build_partition(build_union(G3, ["g1"], F(3, 2)))
    assert len(part.families) == 2
    big = next(f for f in part.families if f.size == 3)
    small = next(f for f in part.families if f.size == 1)
    assert big.delta == F(1, 2)
    assert [big.interval(i) for i in range(big.n_windows)] == [
        (F(1, 2), F(1)), (F(1), F(3, 2))]
    assert [(c.edge, c.lo, c.hi) for c in big.cells] == [
        ("e1", F(0), F(1, 2)), ("e2", F(0), F(1, 2)), ("e3", F(0), F(1, 2))]
    assert small.cells[0].edge == "e1"
    assert (small.cells[0].lo, small.cells[0].hi) == (F(1, 2), F(1))
    assert [small.interval(0)] == [(F(0), F(1, 2))]


def test_partition_g1_small(G1):
    part = build_partition(build_union(G1, ["g"], F(1, 2)))
    assert len(part.families) == 1
    fam = part.families[0]
    assert fam.size == 1 and fam.n_windows == 1
    assert (fam.cells[0].lo, fam.cells[0].hi) == (F(0), F(1, 2))


def test_partition_g1_two_sources(G1):
    part = build_partition(build_union(G1, ["g", "gp"], F(3, 4)))
    sizes = sorted((f.size, f.n_windows) for f in part.families)
    assert sizes == [(2, 1), (2, 2)]
    outer = next(f for f in part.families if f.n_windows == 1)
    inner = next(f for f in part.families if f.n_windows == 2)
    assert {(c.lo, c.hi) for c in outer.cells} == {
        (F(0), F(1, 4)), (F(3, 4), F(1))}
    assert {(c.lo, c.hi) for c in inner.cells} == {
        (F(1, 4), F(1, 2)), (F(1, 2), F(3, 4))}


def test_determination_set_g3(G3):
    part = build_partition(build_union(G3, ["g1"], F(3, 2)))
    # a point at distance 1/4 from the center, inside the 3-cell family
    x = EdgePoint("e1", F(1, 4))
    lam = determination_set(part, x)
    assert x in lam
    assert set(lam) == {EdgePoint("e1", F(1, 4)), EdgePoint("e2", F(1, 4)),
                        EdgePoint("e3", F(1, 4))}
    # near-boundary point determines only itself
    y = EdgePoint("e1", F(3, 4))
    assert determination_set(part, y) == [y]


def test_determination_set_rejects_critical(G3):
    part = build_partition(build_union(G3, ["g1"], F(3, 2)))
    with pytest.raises(ValueError, match="critical or outside"):
        determination_set(part, EdgePoint("e1", F(1, 2)))
    with pytest.raises(ValueError, match="critical or outside"):
        determination_set(part, EdgePoint("e2", F(3, 4)))


def test_alternating_property(G3, small_graphs):
    rng = random.Random(23)
    cases = [(G3, F(3, 2))] + small_graphs[:4]
    for g, horizon in cases:
        sigma = list(g.boundary_ids)[:2]
        part = build_partition(build_union(g, sigma, horizon))
        cells = [(fam, cell) for fam in part.families for cell in fam.cells]
        pts = []
        for fam, cell in rng.sample(cells, min(6, len(cells))):
            den = rng.randint(3, 7)
            for k in (1, den - 1):
                pts.append(EdgePoint(cell.edge, cell.lo + cell.length * F(k, den)))
        sets = [frozenset(determination_set(part, x)) for x in pts]
        for lx in sets:
            for ly in sets:
                assert lx == ly or not (lx & ly)


def test_tau_functions_g3(G3):
    part = build_partition(build_union(G3, ["g1"], F(3, 2)))
    big = next(f for f in part.families if f.size == 3)
    taus = tau_functions(big, "g1")
    assert taus == [AffineMap(F(1, 2), 1), AffineMap(F(3, 2), -1)]
    small = next(f for f in part.families if f.size == 1)
    assert tau_functions(small, "g1") == [AffineMap(F(0), 1)]


def test_tau_presence_and_per_cell_zeros():
    # 3-star with one long leg: the far source covers its own cells only,
    # so amplitude-vector entries vanish cell-wise.  Family-level presence
    # still holds for every union source: each time gap belongs to exactly
    # one family, and a hydra alive during the gap is linked into it.
    import json
    from wavegraph import parse_graph
    doc = {"vertices": [{"id": "v", "boundary": False},
                        {"id": "a", "boundary": True},
                        {"id": "b", "boundary": True},
                        {"id": "c", "boundary": True}],
           "edges": [{"id": "e1", "from": "v", "to": "a", "length": "1"},
                     {"id": "e2", "from": "v", "to": "b", "length": "1"},
                     {"id": "e3", "from": "v", "to": "c", "length": "2"}]}
    g = parse_graph(json.dumps(doc))
    part = build_partition(build_union(g, ["a", "c"], F(5, 4)))
    zero_entries = 0
    for fam in part.families:
        for gamma in ("a", "c"):
            taus = tau_functions(fam, gamma)
            assert all(t is not None for t in taus)
            for i in range(fam.n_windows):
                zero_entries += sum(
                    1 for m in range(fam.size)
                    if fam.amplitude(gamma, i, m) == 0)
    assert zero_entries > 0
    # a boundary vertex outside the source set has no traces: the absent
    # branch is explicit (None), never the number 0
    fam = part.families[0]
    assert tau_functions(fam, "b") == [None] * fam.n_windows


def test_gaps_belong_to_one_family(G3, small_graphs):
    # time windows of distinct families never overlap
    for g, horizon in [(G3, F(3, 2))] + small_graphs[:6]:
        sigma = list(g.boundary_ids)[:2]
        part = build_partition(build_union(g, sigma, horizon))
        windows = []
        for fam in part.families:
            windows.extend(fam.interval(i) for i in range(fam.n_windows))
        windows.sort()
        for (a1, b1), (a2, b2) in zip(windows, windows[1:]):
            assert b1 <= a2


def test_window_lengths_and_sizes(G3, small_graphs):
    for g, horizon in [(G3, F(3, 2))] + small_graphs:
        sigma = list(g.boundary_ids)[:2]
        part = build_partition(build_union(g, sigma, horizon))
        for fam in part.families:
            for i in range(fam.n_windows):
                lo, hi = fam.interval(i)
                assert hi - lo == fam.delta
                assert 0 <= lo and hi <= horizon
            for cell in fam.cells:
                assert cell.length == fam.delta
            mid = fam.delta / 2
            lam = determination_set(part, fam.cells[0].point_at(mid))
            assert len(lam) == fam.size


def test_partition_disjoint_and_complete(G3, small_graphs):
    for g, horizon in [(G3, F(3, 2))] + small_graphs:
        sigma = list(g.boundary_ids)[:2]
        part = build_partition(build_union(g, sigma, horizon))
        per_edge: dict[str, list] = {}
        for fam in part.families:
            for cell in fam.cells:
                per_edge.setdefault(cell.edge, []).append((cell.lo, cell.hi))
        # disjoint
        for ivs in per_edge.values():
            ivs.sort()
            for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
                assert b1 <= a2
        # complete: cells plus critical points tile the filled region exactly
        theta_on = {}
        for p in part.critical:
            if isinstance(p, EdgePoint):
                theta_on.setdefault(p.edge, set()).add(p.s)
        for eid, intervals in part.region.intervals:
            cells = sorted(per_edge.get(eid, []))
            k = 0
            for lo, hi in intervals:
                cursor = lo
                while cursor < hi:
                    assert k < len(cells), "cells do not cover the region"
                    clo, chi = cells[k]
                    assert clo == cursor
                    if cursor != lo:
                        assert cursor in theta_on.get(eid, set())
                    cursor = chi
                    k += 1
                assert cursor == hi
            assert k == len(cells)


def test_theta_union_contains_single_source_thetas(G3):
    union = critical_points(build_union(G3, ["g1", "g2"], F(3, 2)))
    for gamma in ("g1", "g2"):
        single = critical_points(build_union(G3, [gamma], F(3, 2)))
        assert single <= union


def test_critical_points_move_continuously_in_horizon(G3):
    eps = F(1, 16)
    for horizon in (F(1, 2), F(1), F(5, 4), F(3, 2)):
        before = critical_points(build_union(G3, ["g1"], horizon))
        after = critical_points(build_union(G3, ["g1"], horizon + eps))
        for q in after:
            assert min(distance(G3, q, p) for p in before) <= eps
