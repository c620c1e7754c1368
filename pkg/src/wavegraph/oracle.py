"""Independent numerical cross-checks for the exact machinery.

* A unit-CFL leapfrog solver for the wave system: with time step equal to
  the space step the interior update is exact transport, and the discrete
  vertex update reproduces the -(m-2)/m and 2/m splitting exactly for
  grid-aligned data, so the solver is an independent route to wave values.
* A reachable-subspace projection assembled from finite-difference snapshots
  of hat controls, rank-revealed at a configurable threshold.
* A Riemann-Stieltjes approximation of the eikonal from the increasing
  family of reachable-set projections.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .graph import MetricGraph
from .hydra import build_union
from .lattice import Family, Partition, build_partition
from .eikonal import apply_projection, check_commensurable, _slot
from .wave import Control, SampledFunction, hat

RANK_THRESHOLD = 1e-9


class FDGridError(ValueError):
    """Grid step incompatible with edge lengths or the horizon."""


@dataclass
class FDResult:
    """Final state of a leapfrog run: node values per edge (index k is the
    node at s = k*h, endpoints included)."""

    graph: MetricGraph
    step: Fraction
    time: Fraction
    node_values: dict[str, np.ndarray]

    def to_sampled(self) -> SampledFunction:
        """Midpoint samples by averaging adjacent nodes; exact for the
        piecewise-linear waves produced by grid-aligned controls."""
        out = SampledFunction.zeros(self.graph, self.step)
        for eid, nodes in self.node_values.items():
            mids = 0.5 * (nodes[:-1] + nodes[1:])
            out.values[eid] = [float(v) for v in mids]
        return out


def _steps(value: Fraction, h: Fraction, what: str) -> int:
    n = value / h
    if n.denominator != 1:
        raise FDGridError(f"{what} {value} is not an integer multiple of h={h}")
    return int(n)


class _Leapfrog:
    """Unit-CFL stepper.  ``level`` indexes the newest computed time level;
    after construction the solver holds levels 0 (zero data) and 1.
    Exactness of the transport assumes controls vanishing at t = 0."""

    def __init__(self, g: MetricGraph, control: Control, horizon: Fraction,
                 h: Fraction):
        self.g = g
        self.control = control
        self.h = h
        self.n_levels = _steps(horizon, h, "horizon")
        if self.n_levels < 1:
            raise FDGridError("horizon must span at least one time step")
        self.sizes = {e.id: _steps(e.length, h, f"edge {e.id!r} length") + 1
                      for e in g.edges}
        self.prev = {eid: np.zeros(n) for eid, n in self.sizes.items()}
        self.cur = {eid: np.zeros(n) for eid, n in self.sizes.items()}
        self._pin_boundary(self.prev, Fraction(0))
        self._pin_boundary(self.cur, h)
        self.level = 1

    def _pin_boundary(self, state: dict[str, np.ndarray], t: Fraction) -> None:
        for v in self.g.vertices:
            if not v.boundary:
                continue
            eid = self.g.incident(v.id)[0]
            e = self.g.edge(eid)
            idx = 0 if e.tail == v.id else self.sizes[eid] - 1
            state[eid][idx] = float(self.control.value(v.id, t))

    def step(self) -> None:
        g = self.g
        nxt = {}
        for eid, n in self.sizes.items():
            arr = np.zeros(n)
            c, p = self.cur[eid], self.prev[eid]
            if n > 2:
                arr[1:-1] = c[2:] + c[:-2] - p[1:-1]
            nxt[eid] = arr
        for v in g.vertices:
            if v.boundary:
                continue
            acc = 0.0
            e0 = g.edge(g.incident(v.id)[0])
            prev_val = self.prev[e0.id][0 if e0.tail == v.id else -1]
            for eid in g.incident(v.id):
                e = g.edge(eid)
                acc += self.cur[eid][1 if e.tail == v.id else -2]
            val = (2.0 / g.degree(v.id)) * acc - prev_val
            for eid in g.incident(v.id):
                e = g.edge(eid)
                nxt[eid][0 if e.tail == v.id else self.sizes[eid] - 1] = val
        self.level += 1
        self._pin_boundary(nxt, self.level * self.h)
        self.prev, self.cur = self.cur, nxt

    def run_to(self, level: int) -> None:
        while self.level < level:
            self.step()

    def state(self) -> dict[str, np.ndarray]:
        return {eid: arr.copy() for eid, arr in self.cur.items()}


def fd_solve(g: MetricGraph, control: Control, horizon: Fraction,
             h: Fraction) -> FDResult:
    """Leapfrog solution at t = horizon with unit CFL (dt = h) and zero
    initial data."""
    lf = _Leapfrog(g, control, horizon, h)
    lf.run_to(lf.n_levels)
    return FDResult(g, h, horizon, lf.state())


# -- reachable-subspace projection ------------------------------------------------

def _hat_controls(gamma: str, horizon: Fraction, h: Fraction,
                  n_controls: int) -> list[Control]:
    """Grid-aligned triangular pulses whose peaks sweep (0, horizon]."""
    n_h = _steps(horizon, h, "horizon")
    stride = max(1, n_h // max(1, n_controls))
    centers = [k * stride * h for k in range(1, n_h // stride + 1)]
    return [Control.single(gamma, hat(c, stride * h)) for c in centers]


def _snapshot_columns(g: MetricGraph, gamma: str, horizons: Sequence[Fraction],
                      h: Fraction, n_controls: int
                      ) -> dict[Fraction, list[SampledFunction]]:
    """Snapshots of every hat control at each requested horizon.  One
    leapfrog run per control serves all horizons: by causality the state at
    an earlier time is the snapshot of the control truncated to that time."""
    positive = sorted(t for t in horizons if t > 0)
    t_max = positive[-1]
    levels = {t: _steps(t, h, "horizon") for t in positive}
    out: dict[Fraction, list[SampledFunction]] = {t: [] for t in positive}
    for control in _hat_controls(gamma, t_max, h, n_controls):
        lf = _Leapfrog(g, control, t_max, h)
        for t in positive:
            lf.run_to(levels[t])
            out[t].append(FDResult(g, h, t, lf.state()).to_sampled())
    return out


def _flatten(y: SampledFunction, order: list[str]) -> np.ndarray:
    return np.concatenate([np.asarray([float(v) for v in y.values[eid]])
                           for eid in order])


@dataclass
class NumericProjection:
    matrix: np.ndarray
    rank: int
    singular_values: np.ndarray
    edge_order: list[str]


def _projection_from_columns(cols: list[np.ndarray],
                             threshold: float = RANK_THRESHOLD
                             ) -> tuple[np.ndarray, int, np.ndarray]:
    a = np.stack(cols, axis=1)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], a.shape[0])), 0, s
    rank = int(np.sum(s > threshold * s[0]))
    basis = u[:, :rank]
    return basis @ basis.T, rank, s


def numeric_reachable_projection(g: MetricGraph, sources: Iterable[str],
                                 horizon: Fraction, h: Fraction,
                                 n_controls: int) -> NumericProjection:
    """Orthogonal projection onto the span of finite-difference snapshots of
    hat controls at the horizon, in the midpoint sample space."""
    order = sorted(e.id for e in g.edges)
    cols: list[np.ndarray] = []
    for gamma in sorted(set(sources)):
        snaps = _snapshot_columns(g, gamma, [horizon], h, n_controls)[horizon]
        cols.extend(_flatten(y, order) for y in snaps)
    mat, rank, s = _projection_from_columns(cols)
    return NumericProjection(mat, rank, s, order)


def projection_matrix_exact(p: Partition, sources: Iterable[str],
                            h: Fraction) -> np.ndarray:
    """The analytic reachable projection materialized on the midpoint grid
    (column by column through the exact block machinery)."""
    g = p.graph
    order = sorted(e.id for e in g.edges)
    template = SampledFunction.zeros(g, h)
    dim = sum(len(template.values[eid]) for eid in order)
    mat = np.zeros((dim, dim))
    col = 0
    for eid in order:
        for k in range(len(template.values[eid])):
            y = SampledFunction.zeros(g, h)
            y.values[eid][k] = Fraction(1)
            mat[:, col] = _flatten(apply_projection(p, sources, y), order)
            col += 1
    return mat


def numeric_family_increments(g: MetricGraph, gamma: str, fam: Family,
                              h: Fraction, n_controls: int,
                              threshold: float = RANK_THRESHOLD
                              ) -> list[np.ndarray]:
    """Per window of the family: the increment of the projection onto the
    source's numeric reachable directions, extracted from finite-difference
    snapshots restricted to the family cells.  Window boundaries carry no
    partially swept grid cells, so the extraction is clean."""
    n_r = check_commensurable(fam, h)
    boundaries = sorted({start for start, _ in fam.windows}
                        | {start + fam.delta for start, _ in fam.windows})
    snaps = _snapshot_columns(g, gamma, boundaries, h, n_controls)

    def restricted(t: Fraction) -> list[np.ndarray]:
        if t == 0:
            return []
        vecs = []
        for y in snaps[t]:
            for j in range(n_r):
                vec = np.array([float(y.values[cell.edge][_slot(cell, h, j, n_r)])
                                for cell in fam.cells])
                if np.any(vec != 0.0):
                    vecs.append(vec)
        return vecs

    m = fam.size
    cumulative: dict[Fraction, np.ndarray] = {}
    for t in boundaries:
        vecs = restricted(t)
        if not vecs:
            cumulative[t] = np.zeros((m, m))
        else:
            cumulative[t], _, _ = _projection_from_columns(vecs, threshold)
    return [cumulative[start + fam.delta] - cumulative[start]
            for start, _ in fam.windows]


# -- Riemann-Stieltjes eikonal -----------------------------------------------------

def numeric_eikonal(g: MetricGraph, gamma: str, horizon: Fraction,
                    y: SampledFunction, steps: int) -> SampledFunction:
    """sum_k xi_k (P^{xi_k} - P^{xi_{k-1}}) y with xi_k = k*horizon/steps and
    each projection applied exactly on its own partition."""
    total = SampledFunction.zeros(g, y.step)
    prev = SampledFunction.zeros(g, y.step)
    for k in range(1, steps + 1):
        xi = Fraction(k, steps) * horizon
        part = build_partition(build_union(g, [gamma], xi))
        cur = apply_projection(part, [gamma], y)
        delta = cur.sub(prev)
        total.iadd(delta.scale(float(xi)))
        prev = cur
    return total
