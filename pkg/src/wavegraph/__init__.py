"""Exact wave dynamics on metric graphs: hydras, reachable-set projections,
and eikonal block algebras, cross-checked by independent numerics."""

from fractions import Fraction

from .graph import (Edge, EdgePoint, GraphFormatError, GraphPoint, MetricGraph,
                    Region, Vertex, VertexPoint, distance, eccentricity,
                    format_rational, graph_from_dict, graph_to_dict,
                    graph_to_json, neighborhood, parse_graph, parse_rational)
from .hydra import (EventCapError, Hydra, HydraSegment, HydraUnion,
                    NotOnHydraError, SpaceTimePoint, VertexEvent, amplitude_at,
                    build_hydra, build_union, corner_points, fibers, heads,
                    hydra_to_dot, hydra_to_json_dict, split_coefficients)
from .lattice import (AffineMap, Cell, Family, LatticeCapError, Partition,
                      PartitionError, build_partition, critical_points,
                      determination_set, lattice_closure, tau_functions)
from .eikonal import (Commutator, EikonalAlgebra, EikonalBlock, GridError,
                      NestedProjections, ProjectionBlock, amplitude_vectors,
                      apply_block, apply_eikonal, apply_projection,
                      assemble_algebra, commutator, controllability,
                      eikonal_block, exact_rank, nested_projections,
                      projection_block, span_projection)
from .wave import (Control, ReachabilityReport, SampledFunction, evaluate_wave,
                   hat, is_reachable, represent_on_family, wave_snapshot)
from .oracle import (FDResult, NumericProjection, fd_solve,
                     numeric_eikonal, numeric_family_increments,
                     numeric_reachable_projection, projection_matrix_exact)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
