"""Command-line frontend.

Subcommands: validate, hydra, partition, algebra, simulate, verify.  All
data files are deterministic (rationals as strings, no timestamps); tool
metadata lives in a separate "meta" field.

Exit codes: 0 success, 1 missing file or failed verification check,
2 invalid input or computation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .graph import GraphFormatError, format_rational, parse_graph, parse_rational
from .hydra import build_union, hydra_to_dot, hydra_to_json_dict
from .lattice import build_partition, critical_points_csv, partition_to_json_dict
from .eikonal import algebra_to_json_dict, assemble_algebra
from .wave import Control, snapshot_csv, wave_snapshot
from .oracle import fd_solve

META = {"tool": "wavegraph", "version": __version__}


def _fail(code: int, message: str) -> int:
    print(message, file=sys.stderr)
    return code


def _load_graph(path: str):
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"graph file not found: {path}")
    return parse_graph(p.read_text())


def _write(out_dir: str, name: str, text: str) -> Path:
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    target = d / name
    target.write_text(text)
    print(f"wrote {target}")
    return target


def _dump(payload: dict) -> str:
    return json.dumps({"meta": META, **payload}, indent=2, sort_keys=False) + "\n"


def cmd_validate(args) -> int:
    try:
        g = _load_graph(args.graph)
    except FileNotFoundError as exc:
        return _fail(1, f"validate: {exc}")
    except GraphFormatError as exc:
        return _fail(2, f"validate: invalid graph: {exc}")
    print(f"valid metric graph: {len(g.edges)} edges, "
          f"{len(g.interior_ids)} interior, {len(g.boundary_ids)} boundary")
    return 0


def _common(args):
    g = _load_graph(args.graph)
    horizon = parse_rational(args.time)
    sigma = sorted(set(args.sigma)) if getattr(args, "sigma", None) else None
    return g, horizon, sigma


def cmd_hydra(args) -> int:
    try:
        g, horizon, _ = _common(args)
        hu = build_union(g, [args.gamma], horizon, max_events=args.max_events)
    except FileNotFoundError as exc:
        return _fail(1, f"hydra: {exc}")
    except (GraphFormatError, ValueError, RuntimeError) as exc:
        return _fail(2, f"hydra: {exc}")
    _write(args.out, "hydra.json", _dump(hydra_to_json_dict(hu)))
    _write(args.out, "hydra.dot", hydra_to_dot(hu))
    return 0


def cmd_partition(args) -> int:
    try:
        g, horizon, sigma = _common(args)
        hu = build_union(g, sigma, horizon, max_events=args.max_events)
        part = build_partition(hu)
    except FileNotFoundError as exc:
        return _fail(1, f"partition: {exc}")
    except (GraphFormatError, ValueError, RuntimeError) as exc:
        return _fail(2, f"partition: {exc}")
    _write(args.out, "partition.json", _dump(partition_to_json_dict(part)))
    _write(args.out, "critical_points.csv", critical_points_csv(part))
    return 0


def cmd_algebra(args) -> int:
    try:
        g, horizon, sigma = _common(args)
        hu = build_union(g, sigma, horizon, max_events=args.max_events)
        algebra = assemble_algebra(build_partition(hu))
    except FileNotFoundError as exc:
        return _fail(1, f"algebra: {exc}")
    except (GraphFormatError, ValueError, RuntimeError) as exc:
        return _fail(2, f"algebra: {exc}")
    _write(args.out, "algebra.json", _dump(algebra_to_json_dict(algebra)))
    return 0


def cmd_simulate(args) -> int:
    try:
        g, horizon, _ = _common(args)
        control_path = Path(args.controls)
        if not control_path.exists():
            raise FileNotFoundError(f"control file not found: {args.controls}")
        control = Control.from_json(control_path.read_text())
        grid = parse_rational(args.grid)
        if args.solver == "fd":
            snap = fd_solve(g, control, horizon, grid).to_sampled()
        else:
            hu = build_union(g, control.sources, horizon,
                             max_events=args.max_events)
            snap = wave_snapshot(hu, control, horizon, grid)
    except FileNotFoundError as exc:
        return _fail(1, f"simulate: {exc}")
    except (GraphFormatError, ValueError, RuntimeError) as exc:
        return _fail(2, f"simulate: {exc}")
    _write(args.out, "snapshot.csv", snapshot_csv(snap))
    return 0


def cmd_verify(args) -> int:
    from .verify import run_suite
    try:
        checks = run_suite(grid=parse_rational(args.grid),
                           n_controls=args.controls,
                           xi_steps=args.xi_steps)
    except (GraphFormatError, ValueError, RuntimeError) as exc:
        return _fail(2, f"verify: {exc}")
    payload = {"checks": [c.to_json() for c in checks]}
    _write(args.out, "verification.json", _dump(payload))
    failed = 0
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"[{status}] {c.name}: max_error={c.max_error:.3e} "
              f"tolerance={c.tolerance:.3e}")
        failed += 0 if c.passed else 1
    if failed:
        return _fail(1, f"verify: {failed} check(s) failed")
    print("all checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wavegraph",
        description="Exact wave dynamics and eikonal block algebras on metric graphs")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_graph_time(p, sigma=False):
        p.add_argument("--graph", required=True, help="graph JSON document")
        p.add_argument("--time", required=True, help="horizon T as 'p/q'")
        p.add_argument("--max-events", type=int, default=10**6)
        p.add_argument("--out", default=".", help="output directory")
        if sigma:
            p.add_argument("--sigma", action="append", required=True,
                           help="controlled boundary vertex (repeatable)")

    p = sub.add_parser("validate", help="check a graph document")
    p.add_argument("--graph", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("hydra", help="build one source's hydra (JSON + DOT)")
    add_graph_time(p)
    p.add_argument("--gamma", required=True, help="source boundary vertex")
    p.set_defaults(fn=cmd_hydra)

    p = sub.add_parser("partition", help="critical points and families")
    add_graph_time(p, sigma=True)
    p.set_defaults(fn=cmd_partition)

    p = sub.add_parser("algebra", help="eikonal blocks and commutators")
    add_graph_time(p, sigma=True)
    p.set_defaults(fn=cmd_algebra)

    p = sub.add_parser("simulate", help="wave snapshot at the horizon")
    add_graph_time(p)
    p.add_argument("--controls", required=True, help="control JSON file")
    p.add_argument("--grid", required=True, help="grid step h as 'p/q'")
    p.add_argument("--solver", choices=["hydra", "fd"], default="hydra")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("verify", help="run the oracle cross-check suite")
    p.add_argument("--grid", default="1/32")
    p.add_argument("--controls", type=int, default=64)
    p.add_argument("--xi-steps", type=int, default=16)
    p.add_argument("--out", default=".")
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
