#!/usr/bin/env python3
"""Regenerate the committed golden fixtures consumed by the figure scripts.

Runs the CLI (and, for analytic reference curves, the library) and freezes
the resulting trace CSVs and report JSONs under figures/fixtures/.  The
figure scripts and their tests never invoke the solver; they read only these
files.
"""

import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from conftest import make_parabola_trace  # noqa: E402

from pcurves.cli import main as cli  # noqa: E402
from pcurves.domain import Cuboid, Cylinder, DiskSector2D, Prism, PolygonND, save_domain  # noqa: E402
from pcurves.dynamics import (  # noqa: E402
    CurveState,
    SolverConfig,
    integrate,
    min_horizontal_tangent,
    truncate_trace,
)
from pcurves.frame import SphericalAngles  # noqa: E402
from pcurves.moments import moments_polygon, transverse_stats  # noqa: E402
from pcurves.traceio import write_trace_csv, write_trace_sidecar  # noqa: E402
from pcurves.domain import domain_to_dict  # noqa: E402

FIX = ROOT / "figures" / "fixtures"


def fig1_left():
    out = FIX / "fig1-left"
    out.mkdir(parents=True, exist_ok=True)
    save_domain(DiskSector2D(1.0), out / "domain.json")
    cli(
        [
            "solve", "--domain", str(out / "domain.json"), "--x0", f"{2 / 3},0",
            "--zeta0", f"{np.pi / 2}", "--length", "1.1", "--out", str(out), "--name", "trace",
        ]
    )
    cli(
        [
            "validate", "--domain", str(out / "domain.json"), "--trace", str(out / "trace.csv"),
            "--out", str(out / "report.json"), "--samples", "200000", "--nodes", "24", "--ns", "16",
        ]
    )


def fig1_right():
    out = FIX / "fig1-right"
    out.mkdir(parents=True, exist_ok=True)
    save_domain(Cuboid(np.zeros(2), np.ones(2)), out / "domain.json")
    write_trace_csv(make_parabola_trace(n=97), out / "trace.csv")
    rc = cli(
        [
            "validate", "--domain", str(out / "domain.json"), "--trace", str(out / "trace.csv"),
            "--out", str(out / "report.json"), "--samples", "200000", "--nodes", "24", "--ns", "16",
        ]
    )
    assert rc == 3, "the parabola is not principal; validation must fail"


def fig_quadrant_and_square():
    out_q = FIX / "fig-quadrant"
    out_q.mkdir(parents=True, exist_ok=True)
    save_domain(__import__("pcurves.domain", fromlist=["Quadrant2D"]).Quadrant2D(), out_q / "domain.json")
    cli(
        [
            "solve", "--domain", str(out_q / "domain.json"), "--x0", "1,0",
            "--zeta0", f"{np.pi / 2}", "--length", "12", "--out", str(out_q), "--name", "trace",
        ]
    )
    out_s = FIX / "fig-square"
    out_s.mkdir(parents=True, exist_ok=True)
    cli(
        [
            "square-compose", "--trace", str(out_q / "trace.csv"),
            "--out", str(out_s / "square.csv"),
        ]
    )


def fig_prism():
    out = FIX / "fig-prism"
    out.mkdir(parents=True, exist_ok=True)
    base = np.array([[0.0, 1.0], [np.sqrt(3) / 2, -0.5], [-2.0, -0.5]])
    stats = transverse_stats(moments_polygon(PolygonND(base)))
    _, vec = np.linalg.eigh(stats.cov)
    start = base.mean(axis=0) + 0.15 * vec[:, 1]
    init = CurveState(0.0, np.array([*start, 0.0]), SphericalAngles.of(np.pi / 2, np.pi / 2))
    tr = integrate(Prism(base, 40.0), init, SolverConfig(max_length=8.0))
    s_star = min_horizontal_tangent(tr, 5.0, 7.5)
    trunc = truncate_trace(tr, s_star)
    dom = Prism(base, float(trunc.positions[-1][2]))
    save_domain(dom, out / "domain.json")
    write_trace_csv(trunc, out / "trace.csv")
    write_trace_sidecar(trunc, domain_to_dict(dom), out / "trace.json")
    cli(
        [
            "validate", "--domain", str(out / "domain.json"), "--trace", str(out / "trace.csv"),
            "--out", str(out / "report.json"), "--samples", "1000000", "--nodes", "16", "--ns", "24",
        ]
    )


def fig_helix():
    out = FIX / "fig-helix"
    out.mkdir(parents=True, exist_ok=True)
    save_domain(Cylinder(1.0), out / "domain.json")
    cli(
        [
            "helix", "--a", "0.2,0.6,0.66", "--b", "0.5,0.35,0.1", "--r", "1.0",
            "--periods", "2", "--out", str(out / "table.csv"), "--trace-out", str(out),
        ]
    )


if __name__ == "__main__":
    fig1_left()
    fig1_right()
    fig_quadrant_and_square()
    fig_prism()
    fig_helix()
    print(f"fixtures written under {FIX}")
