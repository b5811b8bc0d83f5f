"""Command-line driver: solve curves, validate traces, analyze helices.

Exit codes are the machine contract: 0 clean, 1 spec/IO errors, 2 solve
stopped on an inadmissibility event (partial trace still written), 3
validation thresholds failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .compose import compose_square
from .domain import Cylinder, domain_to_dict, load_domain, save_domain
from .dynamics import CurveState, SolverConfig, integrate
from .errors import PCurvesError
from .frame import SphericalAngles, angles_from_tangent
from .helix import (
    HelixParams,
    _mean_offset_clipped,
    helix_trace,
    jacobian_bound,
    mean_offset_closed_form,
    principal_pitch_search,
)
from .traceio import read_trace_csv, write_trace_csv, write_trace_sidecar
from .validate import admissibility_check, full_report, write_report

CLEAN_STOPS = {"length_budget", "left_domain"}


def _floats(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.split(",") if v != ""])


def _cmd_solve(args) -> int:
    dom = load_domain(args.domain)
    x0 = _floats(args.x0)
    if args.zeta0 is not None:
        angles = SphericalAngles(_floats(args.zeta0), len(x0))
    elif args.tangent is not None:
        t = _floats(args.tangent)
        angles = angles_from_tangent(t / np.linalg.norm(t))
    else:
        print("solve: need --zeta0 or --tangent", file=sys.stderr)
        return 1
    cfg = SolverConfig(
        rel_tol=args.rtol,
        abs_tol=args.atol,
        initial_step=args.initial_step,
        max_step=args.max_step if args.max_step else np.inf,
        max_length=args.length,
    )
    init = CurveState(0.0, x0, angles)
    trace = integrate(dom, init, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_trace_csv(trace, out / f"{args.name}.csv")
    write_trace_sidecar(trace, domain_to_dict(dom), out / f"{args.name}.json")
    reason = trace.meta.get("stop_reason")
    print(f"solve: {len(trace)} states, length {trace.length:.6g}, stop: {reason}")
    return 0 if reason in CLEAN_STOPS else 2


def _cmd_validate(args) -> int:
    dom = load_domain(args.domain)
    trace = read_trace_csv(args.trace)
    truncation = tuple(args.truncate) if args.truncate else None
    report = full_report(
        dom,
        trace,
        n_s=args.ns,
        n_nodes=args.nodes,
        n_samples=args.samples,
        seed=args.seed,
        tie_tol=args.tie_tol,
        truncation=truncation,
    )
    write_report(report, args.out)
    max_res = report.max_residual()
    max_bar = report.max_barycenter_distance()
    ok = (
        max_res <= args.residual_threshold
        and max_bar <= args.barycenter_threshold
        and report.admissible.ok
    )
    print(
        f"validate: residual max {max_res:.3e} (threshold {args.residual_threshold:.1e}), "
        f"barycenter max {max_bar:.4f} (threshold {args.barycenter_threshold}), "
        f"admissible: {report.admissible.ok}"
    )
    return 0 if ok else 3


def _cmd_helix(args) -> int:
    a_values = [float(v) for v in args.a.split(",")]
    b_values = [float(v) for v in args.b.split(",")] if args.b else [None] * len(a_values)
    if len(b_values) != len(a_values):
        print("helix: --a and --b lists must have equal length", file=sys.stderr)
        return 1
    rows = []
    for a, b in zip(a_values, b_values):
        if b is None:
            b = principal_pitch_search(a, args.r)
        if b is None:
            rows.append((a, float("nan"), float("nan"), False))
            continue
        p = HelixParams(a, b, args.r)
        if a == 0:
            residual = 0.0
        elif jacobian_bound(p) <= 1.0:
            residual = abs(mean_offset_closed_form(p)[0]) if b > 0 else float("nan")
        else:
            residual = abs(_mean_offset_clipped(a, b, args.r))
        adm = admissibility_check(
            Cylinder(args.r), helix_trace(p, 129, 1.0), 32
        ).ok
        rows.append((a, b, residual, adm))
        if args.trace_out:
            out = Path(args.trace_out)
            out.mkdir(parents=True, exist_ok=True)
            name = f"helix_a{a:g}_b{b:g}".replace(".", "p")
            write_trace_csv(helix_trace(p, 257, args.periods), out / f"{name}.csv")
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["a", "b", "residual", "admissible"])
        for row in rows:
            writer.writerow([f"{row[0]:.17g}", f"{row[1]:.17g}", f"{row[2]:.17g}", row[3]])
    print(f"helix: wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_square_compose(args) -> int:
    trace = read_trace_csv(args.trace)
    closed = compose_square(trace, which=args.crossing)
    write_trace_csv(closed, args.out)
    sidecar = Path(args.out).with_suffix(".json")
    with open(sidecar, "w") as fh:
        json.dump(
            {
                "format_version": 1,
                "half_side": closed.meta["half_side"],
                "cut_s": closed.meta["cut_s"],
                "closure_gap": closed.meta["closure_gap"],
            },
            fh,
            indent=2,
        )
        fh.write("\n")
    print(
        f"square-compose: half side {closed.meta['half_side']:.6g}, "
        f"cut at s = {closed.meta['cut_s']:.6g}, closure gap {closed.meta['closure_gap']:.2e}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pcurves", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    so = sub.add_parser("solve", help="integrate the curve system on a domain")
    so.add_argument("--domain", required=True)
    so.add_argument("--x0", required=True, help="comma-separated start position")
    so.add_argument("--zeta0", help="comma-separated start angles (radians)")
    so.add_argument("--tangent", help="comma-separated start tangent (alternative to --zeta0)")
    so.add_argument("--length", type=float, required=True)
    so.add_argument("--rtol", type=float, default=1e-8)
    so.add_argument("--atol", type=float, default=1e-10)
    so.add_argument("--initial-step", type=float, default=1e-3)
    so.add_argument("--max-step", type=float, default=0.0, help="0 means unlimited")
    so.add_argument("--out", required=True, help="output directory")
    so.add_argument("--name", default="trace")
    so.add_argument("--seed", type=int, default=0)
    so.set_defaults(func=_cmd_solve)

    va = sub.add_parser("validate", help="validate a trace against a domain")
    va.add_argument("--domain", required=True)
    va.add_argument("--trace", required=True)
    va.add_argument("--out", required=True, help="report JSON path")
    va.add_argument("--samples", type=int, default=1_000_000)
    va.add_argument("--nodes", type=int, default=32)
    va.add_argument("--ns", type=int, default=64)
    va.add_argument("--seed", type=int, default=0)
    va.add_argument("--tie-tol", type=float, default=1e-9)
    va.add_argument("--truncate", type=float, nargs=2, metavar=("LO", "HI"))
    va.add_argument("--residual-threshold", type=float, default=1e-6)
    va.add_argument("--barycenter-threshold", type=float, default=0.01)
    va.set_defaults(func=_cmd_validate)

    he = sub.add_parser("helix", help="principal-pitch table for helices in a cylinder")
    he.add_argument("--a", required=True, help="comma-separated helix radii")
    he.add_argument("--b", help="optional comma-separated pitches (skips the search)")
    he.add_argument("--r", type=float, default=1.0)
    he.add_argument("--periods", type=float, default=3.0)
    he.add_argument("--out", required=True, help="CSV table path")
    he.add_argument("--trace-out", help="directory for analytic helix trace CSVs")
    he.set_defaults(func=_cmd_helix)

    sq = sub.add_parser("square-compose", help="close a quadrant solution into a square curve")
    sq.add_argument("--trace", required=True, help="quadrant trace CSV")
    sq.add_argument("--out", required=True, help="closed-curve CSV path")
    sq.add_argument("--crossing", type=int, default=1)
    sq.set_defaults(func=_cmd_square_compose)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PCurvesError, OSError, ValueError, KeyError) as exc:
        print(f"pcurves {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
