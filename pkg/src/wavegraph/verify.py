"""Cross-validation suite: every exact object checked against its
independent numerical oracle on the built-in graphs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import MetricGraph, EdgePoint, VertexPoint
from .hydra import build_union
from .lattice import build_partition
from .eikonal import (apply_eikonal, apply_projection, assemble_algebra,
                      commutator)
from .wave import Control, SampledFunction, evaluate_wave, hat
from .oracle import (fd_solve, numeric_eikonal, numeric_family_increments,
                     numeric_reachable_projection, projection_matrix_exact)
from .samples import g1, g3


@dataclass
class CheckResult:
    name: str
    max_error: float
    tolerance: float
    passed: bool

    def to_json(self) -> dict:
        return {"name": self.name, "max_error": f"{self.max_error:.17g}",
                "tolerance": f"{self.tolerance:.17g}", "passed": self.passed}


def _node_points(g: MetricGraph, eid: str, h: Fraction):
    e = g.edge(eid)
    n = int(e.length / h)
    for k in range(n + 1):
        s = k * h
        if s == 0:
            yield VertexPoint(e.tail)
        elif s == e.length:
            yield VertexPoint(e.head)
        else:
            yield EdgePoint(eid, s)


def check_fd_vs_hydra(g: MetricGraph, sources, horizon: Fraction,
                      h: Fraction, tol: float = 1e-9) -> float:
    controls = Control.from_dict({
        gamma: [{"t": t, "value": v}
                for t, v in hat(horizon / 2 + Fraction(k, 16) * horizon, horizon / 4)]
        for k, gamma in enumerate(sources)})
    fd = fd_solve(g, controls, horizon, h)
    hu = build_union(g, sources, horizon)
    worst = 0.0
    for eid, nodes in fd.node_values.items():
        for k, x in enumerate(_node_points(g, eid, h)):
            exact = float(evaluate_wave(hu, controls, x, horizon))
            worst = max(worst, abs(nodes[k] - exact))
    return worst


def check_projection(g: MetricGraph, sources, horizon: Fraction, h: Fraction,
                     n_controls: int) -> float:
    part = build_partition(build_union(g, sources, horizon))
    exact = projection_matrix_exact(part, sources, h)
    numeric = numeric_reachable_projection(g, sources, horizon, h, n_controls)
    return float(np.linalg.norm(exact - numeric.matrix, 2))


def check_stieltjes(g: MetricGraph, gamma: str, horizon: Fraction,
                    steps: int) -> float:
    h = Fraction(1, (horizon / steps).denominator)
    y = SampledFunction.from_function(g, h, lambda x: Fraction(1))
    approx = numeric_eikonal(g, gamma, horizon, y, steps)
    part = build_partition(build_union(g, [gamma], horizon))
    exact = apply_eikonal(assemble_algebra(part), gamma, y)
    return approx.sub(exact).norm() / y.norm()


def check_commutators(g: MetricGraph, sources, horizon: Fraction, h: Fraction,
                      n_controls: int) -> float:
    """Exact block commutators against commutators of blocks rebuilt from
    finite-difference reachable increments."""
    part = build_partition(build_union(g, sources, horizon))
    algebra = assemble_algebra(part)
    worst = 0.0
    for j, fam in enumerate(part.families):
        incs = {gamma: numeric_family_increments(g, gamma, fam, h, n_controls)
                for gamma in sources}
        for a in range(len(sources)):
            for b in range(a + 1, len(sources)):
                ga, gb = sources[a], sources[b]
                com = commutator(algebra.block(ga, j), algebra.block(gb, j))
                for r in (fam.delta / 4, fam.delta / 2, fam.delta * 3 / 4):
                    taus = [float(fam.time_map(i)(r))
                            for i in range(fam.n_windows)]
                    ea = sum(t * dp for t, dp in zip(taus, incs[ga]))
                    eb = sum(t * dp for t, dp in zip(taus, incs[gb]))
                    num = ea @ eb - eb @ ea
                    ex = np.array([[float(x) for x in row]
                                   for row in com.at(r)])
                    worst = max(worst, float(np.max(np.abs(num - ex))))
    return worst


def check_monotonicity(g: MetricGraph, gamma: str, horizons, h: Fraction,
                       n_samples: int, seed: int = 7) -> float:
    import random
    rng = random.Random(seed)
    ys = []
    for _ in range(n_samples):
        y = SampledFunction.from_function(
            g, h, lambda x: Fraction(rng.randint(-8, 8), 8))
        ys.append(y)
    worst = 0.0
    prev = None
    for horizon in sorted(horizons):
        part = build_partition(build_union(g, [gamma], horizon))
        vals = [apply_projection(part, [gamma], y).inner(y) for y in ys]
        if prev is not None:
            for a, b in zip(prev, vals):
                worst = max(worst, a - b)
        prev = vals
    return worst


def run_suite(grid: Fraction = Fraction(1, 32), n_controls: int = 64,
              xi_steps: int = 16) -> list[CheckResult]:
    G1, G3 = g1(), g3()
    checks: list[CheckResult] = []

    def add(name, value, tol):
        checks.append(CheckResult(name, float(value), float(tol),
                                  bool(float(value) <= float(tol))))

    worst = 0.0
    for g, sources in ((G1, ["g", "gp"]), (G3, ["g1", "g2"])):
        for horizon in (Fraction(1, 2), Fraction(1), Fraction(3, 2)):
            worst = max(worst, check_fd_vs_hydra(g, sources, horizon, grid))
    add("fd-vs-hydra node values (G1,G3; T=1/2,1,3/2)", worst, 1e-9)

    add("reachable projection G1 (gamma, T=1/2)",
        check_projection(G1, ["g"], Fraction(1, 2), grid, n_controls), 1e-6)
    add("reachable projection G3 (gamma1, T=3/2)",
        check_projection(G3, ["g1"], Fraction(3, 2), grid, n_controls), 1e-6)
    add("reachable projection G3 (gamma1+gamma2, T=3/2)",
        check_projection(G3, ["g1", "g2"], Fraction(3, 2), grid, n_controls),
        1e-6)

    add(f"stieltjes eikonal G1 (T=3/2, K={xi_steps})",
        check_stieltjes(G1, "g", Fraction(3, 2), xi_steps),
        float(2 * Fraction(3, 2) / xi_steps))
    add(f"stieltjes eikonal G3 (T=3/2, K={xi_steps})",
        check_stieltjes(G3, "g1", Fraction(3, 2), xi_steps),
        float(2 * Fraction(3, 2) / xi_steps))

    add("block commutators vs numeric increments (G3, T=3/2)",
        check_commutators(G3, ["g1", "g2"], Fraction(3, 2), grid, n_controls),
        1e-6)

    add("projection monotonicity in T (G3)",
        check_monotonicity(G3, "g1",
                           [Fraction(1, 2), Fraction(1), Fraction(5, 4),
                            Fraction(3, 2)], Fraction(1, 16), 5), 1e-9)
    return checks
