"""Amplitude vectors, exact projections, and eikonal block matrices.

Per family and source the amplitude vectors are read off the hydra traces;
an unnormalized Gram-Schmidt sweep in ascending window order produces exact
rank-<=1 rational increment matrices dP_i = b b^T / <b, b>.  The eikonal
block is the affine matrix map r -> C0 + r*C1 with
C0 + r*C1 = sum_i t_i(r) * dP_i, the projection block is sum_i dP_i, and the
whole algebra is a direct sum of such blocks over the families.  Everything
in this module is exact rational arithmetic; floats appear only in reports.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .graph import format_rational
from .hydra import HydraUnion
from .lattice import AffineMap, Family, Partition, tau_functions

Vector = tuple[Fraction, ...]
Matrix = tuple[tuple[Fraction, ...], ...]


class GridError(ValueError):
    """Sample grid is not commensurable with the partition cells."""


# -- small exact linear algebra ----------------------------------------------

def vdot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def zero_matrix(n: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c: Fraction, a: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    # row-sparse accumulation: projection increments are mostly zeros
    n = len(b[0])
    zero = Fraction(0)
    out = []
    for row in a:
        acc = [zero] * n
        for k, x in enumerate(row):
            if x:
                brow = b[k]
                for j in range(n):
                    if brow[j]:
                        acc[j] += x * brow[j]
        out.append(tuple(acc))
    return tuple(out)


def frobenius_inner(a: Matrix, b: Matrix) -> Fraction:
    """Entrywise inner product; for symmetric idempotents it equals
    ||AB||_F^2, so a zero value is equivalent to AB = 0."""
    return sum((x * y for ra, rb in zip(a, b) for x, y in zip(ra, rb)),
               Fraction(0))


def mat_vec(a: Matrix, v: Sequence) -> list:
    return [sum(c * x for c, x in zip(row, v)) for row in a]


def outer_projection(b: Vector) -> Matrix:
    """b b^T / <b, b> for a nonzero rational vector b."""
    nn = vdot(b, b)
    return tuple(tuple(bi * bj / nn for bj in b) for bi in b)


def gram_schmidt_residuals(vectors: Sequence[Vector]) -> list[Optional[Vector]]:
    """Unnormalized Gram-Schmidt residuals in the given order; None marks a
    vector already in the span of its predecessors."""
    basis: list[Vector] = []
    out: list[Optional[Vector]] = []
    for v in vectors:
        r = list(v)
        for b in basis:
            coef = vdot(r, b) / vdot(b, b)
            r = [x - coef * y for x, y in zip(r, b)]
        if any(x != 0 for x in r):
            res = tuple(r)
            basis.append(res)
            out.append(res)
        else:
            out.append(None)
    return out


def exact_rank(vectors: Sequence[Vector]) -> int:
    return sum(1 for r in gram_schmidt_residuals(vectors) if r is not None)


# -- amplitude vectors and nested projections ----------------------------------

def amplitude_vectors(fam: Family, gamma: str) -> list[Vector]:
    """One vector per window: entry m is the branch amplitude of the source's
    hydra over cell m during the window, 0 where the hydra is absent."""
    return [tuple(fam.amplitude(gamma, i, m) for m in range(fam.size))
            for i in range(fam.n_windows)]


def validate_amplitude_constancy(fam: Family, hu: HydraUnion, gamma: str) -> None:
    """Cross-check the stored trace amplitudes against direct hydra amplitude
    queries at two parameter values per cell."""
    from .hydra import SpaceTimePoint, amplitude_at
    h = hu.hydras[gamma]
    for (src, i, m), amp in fam.traces.items():
        if src != gamma:
            continue
        tmap = fam.time_map(i)
        for r in (fam.delta / 3, fam.delta * 2 / 3):
            p = SpaceTimePoint(fam.cells[m].point_at(r), tmap(r))
            if amplitude_at(h, p) != amp:
                raise PartitionInternalError(
                    f"amplitude of {gamma!r} is not constant over cell {m}, "
                    f"window {i}")


class PartitionInternalError(RuntimeError):
    pass


@dataclass(frozen=True)
class NestedProjections:
    """Mutually orthogonal rank-<=1 projection increments, one per window,
    whose partial sums project onto the spans of the leading amplitude
    vectors."""

    increments: tuple[Matrix, ...]
    ranks: tuple[int, ...]
    residuals: tuple[Optional[Vector], ...]  # unnormalized; for float reports

    @property
    def size(self) -> int:
        return len(self.increments[0]) if self.increments else 0

    def total(self) -> Matrix:
        acc = zero_matrix(self.size)
        for dp in self.increments:
            acc = mat_add(acc, dp)
        return acc

    def beta_floats(self) -> list[Optional[list[float]]]:
        out: list[Optional[list[float]]] = []
        for b in self.residuals:
            if b is None:
                out.append(None)
            else:
                norm = float(vdot(b, b)) ** 0.5
                out.append([float(x) / norm for x in b])
        return out


def nested_projections(vectors: Sequence[Vector]) -> NestedProjections:
    if not vectors:
        raise ValueError("need at least one amplitude vector")
    n = len(vectors[0])
    if any(len(v) != n for v in vectors):
        raise ValueError("amplitude vectors differ in dimension")
    residuals = gram_schmidt_residuals(vectors)
    incs = tuple(outer_projection(b) if b is not None else zero_matrix(n)
                 for b in residuals)
    ranks = tuple(0 if b is None else 1 for b in residuals)
    return NestedProjections(incs, ranks, tuple(residuals))


def projection_block(fam: Family, gamma: str) -> Matrix:
    """Matrix of the orthogonal projection onto the span of the source's
    amplitude vectors: the sum of the nested increments."""
    return nested_projections(amplitude_vectors(fam, gamma)).total()


def span_projection(fam: Family, sources: Iterable[str]) -> Matrix:
    """Projection onto the span of the stacked amplitude vectors of several
    sources (the reachable directions of the whole source set)."""
    stacked: list[Vector] = []
    for gamma in sorted(set(sources)):
        stacked.extend(amplitude_vectors(fam, gamma))
    if not stacked:
        raise ValueError("no amplitude vectors: empty source set")
    acc = zero_matrix(len(stacked[0]))
    for b in gram_schmidt_residuals(stacked):
        if b is not None:
            acc = mat_add(acc, outer_projection(b))
    return acc


# -- blocks ---------------------------------------------------------------------

@dataclass(frozen=True)
class EikonalBlock:
    """Exact affine matrix map r -> C0 + r*C1 of one (source, family) block,
    with its factorization into time maps and projection increments."""

    family: Family
    source: str
    c0: Matrix
    c1: Matrix
    factors: tuple[tuple[Optional[AffineMap], Matrix], ...]

    @property
    def size(self) -> int:
        return self.family.size

    def matrix_at(self, r: Fraction) -> Matrix:
        return mat_add(self.c0, mat_scale(r, self.c1))


@dataclass(frozen=True)
class ProjectionBlock:
    family: Family
    source: str
    matrix: Matrix

    @property
    def size(self) -> int:
        return self.family.size

    def matrix_at(self, r: Fraction) -> Matrix:
        return self.matrix


def eikonal_block(fam: Family, gamma: str) -> EikonalBlock:
    vectors = amplitude_vectors(fam, gamma)
    nested = nested_projections(vectors)
    taus = tau_functions(fam, gamma)
    n = fam.size
    c0, c1 = zero_matrix(n), zero_matrix(n)
    factors = []
    for tau, dp in zip(taus, nested.increments):
        factors.append((tau, dp))
        if tau is None:
            if any(any(x != 0 for x in row) for row in dp):
                warnings.warn(
                    f"window without a {gamma!r} trace has a nonzero "
                    "projection increment; dropping the term", RuntimeWarning)
            continue
        c0 = mat_add(c0, mat_scale(tau.offset, dp))
        c1 = mat_add(c1, mat_scale(Fraction(tau.sign), dp))
    return EikonalBlock(fam, gamma, c0, c1, tuple(factors))


@dataclass
class EikonalAlgebra:
    """All (source, family) blocks of one partition, with the direct-sum
    structure given by the family list."""

    partition: Partition
    blocks: dict[tuple[str, int], EikonalBlock]
    projections: dict[tuple[str, int], ProjectionBlock]

    def block(self, gamma: str, fam_index: int) -> EikonalBlock:
        return self.blocks[(gamma, fam_index)]


def assemble_algebra(p: Partition) -> EikonalAlgebra:
    blocks = {}
    projections = {}
    for j, fam in enumerate(p.families):
        for gamma in p.sigma:
            blk = eikonal_block(fam, gamma)
            blocks[(gamma, j)] = blk
            acc = zero_matrix(fam.size)
            for _, dp in blk.factors:
                acc = mat_add(acc, dp)
            projections[(gamma, j)] = ProjectionBlock(fam, gamma, acc)
    return EikonalAlgebra(p, blocks, projections)


# -- commutators -----------------------------------------------------------------

@dataclass(frozen=True)
class Commutator:
    """[A(r), B(r)] for affine A, B as an exact quadratic matrix polynomial
    k0 + r*k1 + r^2*k2."""

    k0: Matrix
    k1: Matrix
    k2: Matrix

    @property
    def is_zero(self) -> bool:
        return all(all(x == 0 for x in row)
                   for k in (self.k0, self.k1, self.k2) for row in k)

    def at(self, r: Fraction) -> Matrix:
        return mat_add(self.k0,
                       mat_add(mat_scale(r, self.k1), mat_scale(r * r, self.k2)))


def commutator(a: EikonalBlock, b: EikonalBlock) -> Commutator:
    if a.size != b.size:
        raise ValueError("blocks have different dimensions")

    def brk(x: Matrix, y: Matrix) -> Matrix:
        return mat_sub(mat_mul(x, y), mat_mul(y, x))

    k0 = brk(a.c0, b.c0)
    k1 = mat_add(mat_sub(mat_mul(a.c0, b.c1), mat_mul(b.c1, a.c0)),
                 mat_sub(mat_mul(a.c1, b.c0), mat_mul(b.c0, a.c1)))
    k2 = brk(a.c1, b.c1)
    return Commutator(k0, k1, k2)


# -- controllability ---------------------------------------------------------------

@dataclass(frozen=True)
class ControllabilityReport:
    controllable: bool
    covers_graph: bool
    family_ranks: tuple[tuple[int, int], ...]  # (rank, size) per family


def controllability(p: Partition, sources: Iterable[str]) -> ControllabilityReport:
    """Full rank of the stacked amplitude vectors on every family plus full
    measure of the filled region is exactly the solvability of the boundary
    control problem from the given sources."""
    srcs = sorted(set(sources))
    unknown = [s for s in srcs if s not in p.sigma]
    if unknown:
        raise ValueError(f"sources {unknown} are not part of the partition")
    ranks = []
    full = True
    for fam in p.families:
        stacked: list[Vector] = []
        for gamma in srcs:
            stacked.extend(amplitude_vectors(fam, gamma))
        rank = exact_rank(stacked)
        ranks.append((rank, fam.size))
        full = full and rank == fam.size
    covers = p.region.total_length() == p.graph.total_length
    return ControllabilityReport(full and covers, covers, tuple(ranks))


# -- applying blocks to sampled functions --------------------------------------------

def check_commensurable(fam: Family, h: Fraction) -> int:
    """Number of grid cells per family cell, or raise GridError."""
    for cell in fam.cells:
        for endpoint in (cell.lo, cell.hi):
            if (endpoint / h).denominator != 1:
                raise GridError(
                    f"grid step {h} does not align with cell boundary "
                    f"{cell.edge}:{format_rational(endpoint)}")
    n = fam.delta / h
    if n.denominator != 1 or n == 0:
        raise GridError(f"grid step {h} does not divide cell length {fam.delta}")
    return int(n)


def _slot(cell, h: Fraction, j: int, n_r: int) -> int:
    base = int(cell.lo / h)
    return base + j if cell.orient == 1 else base + n_r - 1 - j


def apply_block(block: EikonalBlock | ProjectionBlock, y) -> "SampledFunction":
    """Apply one block: gather the sample vector over the family cells at
    each grid parameter, multiply by the (affine or constant) matrix, scatter
    back.  The result is zero outside the family."""
    from .wave import SampledFunction
    fam = block.family
    n_r = check_commensurable(fam, y.step)
    out = SampledFunction.zeros(y.graph, y.step)
    half = Fraction(1, 2)
    for j in range(n_r):
        r = (j + half) * y.step
        mat = block.matrix_at(r)
        vec = [y.values[cell.edge][_slot(cell, y.step, j, n_r)]
               for cell in fam.cells]
        w = mat_vec(mat, vec)
        for cell, val in zip(fam.cells, w):
            out.values[cell.edge][_slot(cell, y.step, j, n_r)] = val
    return out


def _apply_constant_blocks(p: Partition, mats: list[Matrix], y) -> "SampledFunction":
    from .wave import SampledFunction
    out = SampledFunction.zeros(y.graph, y.step)
    for fam, mat in zip(p.families, mats):
        n_r = check_commensurable(fam, y.step)
        for j in range(n_r):
            vec = [y.values[cell.edge][_slot(cell, y.step, j, n_r)]
                   for cell in fam.cells]
            w = mat_vec(mat, vec)
            for cell, val in zip(fam.cells, w):
                out.values[cell.edge][_slot(cell, y.step, j, n_r)] = val
    return out


def apply_projection(p: Partition, sources: Iterable[str], y) -> "SampledFunction":
    """Apply the reachable-set projection of the given source set: per family
    the span projection of the stacked amplitude vectors, zero outside the
    filled region."""
    srcs = sorted(set(sources))
    mats = [span_projection(fam, srcs) for fam in p.families]
    return _apply_constant_blocks(p, mats, y)


def apply_eikonal(algebra: EikonalAlgebra, gamma: str, y) -> "SampledFunction":
    """Apply the full eikonal of one source: the direct sum of its blocks."""
    from .wave import SampledFunction
    out = SampledFunction.zeros(y.graph, y.step)
    for j, fam in enumerate(algebra.partition.families):
        piece = apply_block(algebra.block(gamma, j), y)
        out.iadd(piece)
    return out


# -- reports -----------------------------------------------------------------------

def _matrix_json(mat: Matrix) -> list[str]:
    return [format_rational(x) for row in mat for x in row]


def algebra_to_json_dict(algebra: EikonalAlgebra) -> dict:
    p = algebra.partition
    fams = []
    for j, fam in enumerate(p.families):
        per_source = {}
        for gamma in p.sigma:
            blk = algebra.block(gamma, j)
            vectors = amplitude_vectors(fam, gamma)
            nested = nested_projections(vectors)
            per_source[gamma] = {
                "alpha": [[format_rational(x) for x in v] for v in vectors],
                "beta_float": [
                    None if b is None else [f"{x:.17g}" for x in b]
                    for b in nested.beta_floats()],
                "increments": [_matrix_json(dp) for dp in nested.increments],
                "projection": _matrix_json(algebra.projections[(gamma, j)].matrix),
                "c0": _matrix_json(blk.c0),
                "c1": _matrix_json(blk.c1),
                "rank": sum(nested.ranks),
            }
        commutators = []
        for a in range(len(p.sigma)):
            for b in range(a + 1, len(p.sigma)):
                ga, gb = p.sigma[a], p.sigma[b]
                com = commutator(algebra.block(ga, j), algebra.block(gb, j))
                commutators.append({
                    "sources": [ga, gb],
                    "k0": _matrix_json(com.k0),
                    "k1": _matrix_json(com.k1),
                    "k2": _matrix_json(com.k2),
                    "is_zero": com.is_zero,
                })
        fams.append({
            "size": fam.size,
            "delta": format_rational(fam.delta),
            "windows": [{"start": format_rational(start),
                         "end": format_rational(start + fam.delta),
                         "slope": lam} for start, lam in fam.windows],
            "sources": per_source,
            "commutators": commutators,
        })
    return {
        "horizon": format_rational(p.horizon),
        "sources": list(p.sigma),
        "families": fams,
    }
