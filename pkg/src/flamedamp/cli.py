"""Command-line front end.

Exit codes: 0 safe/contained, 3 unsafe/not contained, 1 input error,
2 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
import warnings
from typing import Sequence

import numpy as np

from . import design as design_mod
from .dynamics import (
    IllConditionedBasisError, StepSizeError, closed_form_trajectory, detect_divergence,
    integrate_direct, modal_decompose, random_initial_condition, write_trajectory_csv)
from .graph import GraphFormatError, WeightedDigraph, build_laplacian, load_edge_list, max_out_degree
from .modes import DampingParams, classify_network, worst_margin, write_mode_csv
from .region import emit_region_csv, emit_region_svg, nondivergence_boundary
from .spectral import EigensolverError, GershgorinDisk, compute_spectrum

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_UNSAFE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _json_float(x: float):
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


def _read_graph(args) -> WeightedDigraph:
    if args.graph == "-":
        return load_edge_list(sys.stdin, header=args.header, nodes=args.nodes)
    try:
        with open(args.graph, encoding="utf-8") as fh:
            return load_edge_list(fh, header=args.header, nodes=args.nodes)
    except OSError as exc:
        raise UsageError(f"cannot read {args.graph}: {exc}") from exc


def _d_max(args) -> tuple[float, WeightedDigraph | None]:
    if args.dmax is not None:
        if args.dmax < 0:
            raise UsageError("--dmax must be nonnegative")
        return float(args.dmax), None
    if args.graph is None:
        raise UsageError("provide a graph file or --dmax")
    g = _read_graph(args)
    return max_out_degree(g), g


def _params(args) -> DampingParams:
    if args.gamma0 is None:
        raise UsageError("--gamma0 is required for this command")
    try:
        return DampingParams(args.gamma0, args.gamma1)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


@contextlib.contextmanager
def _sink(path, mode="w"):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, mode, encoding="utf-8", newline="") as fh:
            yield fh


def cmd_analyze(args) -> int:
    if args.graph is None:
        raise UsageError("analyze needs a graph file")
    g = _read_graph(args)
    p = _params(args)
    spectrum = compute_spectrum(build_laplacian(g))
    safe, reports = classify_network(spectrum, p)
    if args.format == "csv":
        with _sink(args.output) as out:
            write_mode_csv(reports, out)
    else:
        payload = {
            "d_max": spectrum.d_max,
            "gamma0": p.gamma0,
            "gamma1": p.gamma1,
            "safe": safe,
            "worst_margin": _json_float(worst_margin(reports)),
            "condition_estimate": _json_float(spectrum.condition_estimate),
            "modes": [dict(mu=mu, **{k: _json_float(v) if isinstance(v, float) else v
                                     for k, v in rep.as_dict().items()})
                      for mu, rep in enumerate(reports)],
        }
        with _sink(args.output) as out:
            out.write(_dump(payload) + "\n")
    return EXIT_OK if safe else EXIT_UNSAFE


def cmd_design(args) -> int:
    d_max, _ = _d_max(args)
    res = design_mod.design_damping(d_max, args.gamma1, args.samples, seed=args.seed)
    payload = {
        "d_max": res.d_max,
        "gamma1": res.gamma1,
        "gamma0_min": res.gamma0_min,
        "case": res.case_label,
        "contained_at_min": res.contained,
    }
    with _sink(args.output) as out:
        out.write(_dump(payload) + "\n")
    return EXIT_OK


def cmd_check(args) -> int:
    d_max, _ = _d_max(args)
    p = _params(args)
    c = design_mod.disk_contained(d_max, p, args.samples, seed=args.seed)
    payload = {
        "d_max": d_max,
        "gamma0": p.gamma0,
        "gamma1": p.gamma1,
        "gamma0_min": design_mod.min_gamma0(d_max, p.gamma1),
        "case": design_mod.case_classify(d_max, p),
        "contained": c.contained,
        "worst_margin": c.worst_margin,
        "worst_point": [c.worst_point.real, c.worst_point.imag],
    }
    with _sink(args.output) as out:
        out.write(_dump(payload) + "\n")
    return EXIT_OK if c.contained else EXIT_UNSAFE


def cmd_region(args) -> int:
    d_max, _ = _d_max(args)
    p = _params(args)
    disk = GershgorinDisk(d_max, d_max)
    span = 2.0 * d_max if d_max > 0 else 1.0
    re_min = args.re_min if args.re_min is not None else 0.0
    re_max = args.re_max if args.re_max is not None else 1.1 * span
    curve = nondivergence_boundary(p, re_min, re_max, args.points, disk)
    with _sink(args.output) as out:
        if args.format == "svg":
            emit_region_svg(curve, out)
        else:
            emit_region_csv(curve, out)
    contained = design_mod.disk_contained(d_max, p, args.samples, seed=args.seed).contained
    print(_dump({"d_max": d_max, "gamma0": p.gamma0, "gamma1": p.gamma1,
                 "contained": contained}), file=sys.stderr)
    return EXIT_OK if contained else EXIT_UNSAFE


def cmd_simulate(args) -> int:
    if args.graph is None:
        raise UsageError("simulate needs a graph file")
    g = _read_graph(args)
    p = _params(args)
    lap = build_laplacian(g)
    spectrum = compute_spectrum(lap)
    safe, reports = classify_network(spectrum, p)
    ic = random_initial_condition(np.random.default_rng(args.seed), g.node_count)
    if args.method == "modal":
        mc = modal_decompose(spectrum, ic, p)
        steps = int(math.floor(args.t_end / args.dt + 1e-9))
        tr = closed_form_trajectory(spectrum, mc, np.arange(steps + 1) * args.dt)
    else:
        tr = integrate_direct(lap, p, ic, args.t_end, args.dt, spectrum=spectrum)
    summary = {"d_max": spectrum.d_max, "gamma0": p.gamma0, "gamma1": p.gamma1,
               "method": args.method, "samples": len(tr), "overflowed": tr.overflowed,
               "classified_safe": safe}
    if tr.energy is not None and len(tr) >= 16:
        divergent, rate = detect_divergence(tr)
        summary.update(divergent=divergent, growth_rate=_json_float(rate))
    else:
        summary.update(divergent=tr.overflowed, growth_rate=None)
    if args.output is not None:
        with _sink(args.output) as out:
            write_trajectory_csv(tr, out)
    print(_dump(summary))
    return EXIT_UNSAFE if summary["divergent"] else EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "design": cmd_design,
    "check": cmd_check,
    "region": cmd_region,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("graph", nargs="?", help="edge-list CSV (source,target,weight); '-' for stdin")
    common.add_argument("--nodes", type=int, help="override the node count")
    common.add_argument("--header", action="store_true", help="skip the first line of the edge list")
    common.add_argument("--dmax", type=float, help="use this maximum out-degree instead of a graph")
    common.add_argument("--gamma0", type=float, help="constant damping term")
    common.add_argument("--gamma1", type=float, default=0.0, help="frequency-dependent term (default 0)")
    common.add_argument("-o", "--output", help="output file (default stdout)")
    common.add_argument("--samples", type=int, default=4096, help="Gershgorin boundary samples")
    common.add_argument("--seed", type=int, help="seed for interior jitter and initial conditions")

    parser = argparse.ArgumentParser(
        prog="flamedamp",
        description="Damping design against energy divergence in the network oscillation model.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common], help="classify every mode of a graph")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    sub.add_parser("design", parents=[common], help="minimum gamma0 for a given gamma1")
    sub.add_parser("check", parents=[common], help="check disk containment for (gamma0, gamma1)")
    p = sub.add_parser("region", parents=[common], help="emit the non-divergence region")
    p.add_argument("--format", choices=["csv", "svg"], default="csv")
    p.add_argument("--points", type=int, default=512, help="grid points along Re")
    p.add_argument("--re-min", type=float)
    p.add_argument("--re-max", type=float)
    p = sub.add_parser("simulate", parents=[common], help="integrate the wave equation")
    p.add_argument("--t-end", type=float, default=20.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--method", choices=["direct", "modal"], default="direct")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and args.seed is None:
        args.seed = 0
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](args)
    except (IllConditionedBasisError, EigensolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, GraphFormatError, StepSizeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
