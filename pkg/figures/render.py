#!/usr/bin/env python3
"""Render figure analogues from trace CSV and report JSON files.

The scripts only draw what the solver and validator emitted: curve samples
come from trace CSVs, barycenters and section triangles from report JSONs,
and domain outlines from the domain JSON parameters.  Nothing numerical is
recomputed here.

Usage: render.py --fig <id> --in <dir> --out <png>

Figure ids and the files expected in the input directory:
    fig1-left    domain.json (disk sector), trace.csv, report.json
    fig1-right   domain.json (unit square), trace.csv, report.json
    fig-quadrant trace.csv
    fig-square   square.csv, square.json
    fig-prism    domain.json (prism), trace.csv, report.json
    fig-helix    helix_*.csv (one per panel), domain.json (cylinder)
"""

import argparse
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_IDS = ["fig1-left", "fig1-right", "fig-quadrant", "fig-square", "fig-prism", "fig-helix"]


class MissingInput(RuntimeError):
    pass


def require(path: Path) -> Path:
    if not path.exists():
        raise MissingInput(f"missing input file: {path}")
    return path


def read_trace(path: Path):
    """Columns of a trace CSV keyed by header name."""
    lines = [ln for ln in require(path).read_text().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if data.size == 0:
        raise MissingInput(f"empty trace: {path}")
    return {name: data[:, i] for i, name in enumerate(header)}


def read_json(path: Path):
    with open(require(path)) as fh:
        return json.load(fh)


def positions(trace):
    cols = sorted((k for k in trace if k.startswith("x")), key=lambda k: int(k[1:]))
    return np.column_stack([trace[k] for k in cols])


def new_axes(three_d=False):
    fig = plt.figure(figsize=(6.0, 6.0), dpi=150)
    if three_d:
        ax = fig.add_subplot(projection="3d")
    else:
        ax = fig.add_subplot()
        ax.set_aspect("equal")
    return fig, ax


def draw_barycenters(ax, report, color):
    nodes = [np.asarray(c["node_point"]) for c in report["barycenters"] if c["barycenter"]]
    barys = [np.asarray(c["barycenter"]) for c in report["barycenters"] if c["barycenter"]]
    if not nodes:
        return
    nodes, barys = np.asarray(nodes), np.asarray(barys)
    if nodes.shape[1] == 2:
        ax.plot(nodes[:, 0], nodes[:, 1], "o", color="tab:blue", ms=5, label="curve nodes")
        ax.plot(barys[:, 0], barys[:, 1], "o", color=color, ms=3.5, label="cell barycenters")
    else:
        ax.plot(*nodes.T, "o", color="tab:blue", ms=5, label="curve nodes")
        ax.plot(*barys.T, "o", color=color, ms=3.5, label="cell barycenters")


def fig1_left(indir: Path, out: Path):
    dom = read_json(indir / "domain.json")
    trace = read_trace(indir / "trace.csv")
    report = read_json(indir / "report.json")
    fig, ax = new_axes()
    th = np.linspace(dom.get("theta0", 0.0), dom.get("theta1", np.pi / 2), 200)
    r = dom["r"]
    ax.plot(r * np.cos(th), r * np.sin(th), color="0.4", lw=1)
    ax.plot([0, r * np.cos(th[0])], [0, r * np.sin(th[0])], color="0.4", lw=1)
    ax.plot([0, r * np.cos(th[-1])], [0, r * np.sin(th[-1])], color="0.4", lw=1)
    p = positions(trace)
    ax.plot(p[:, 0], p[:, 1], color="tab:blue", lw=1.2, label="curve")
    draw_barycenters(ax, report, "tab:red")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title("quarter disk: cell barycenters on the curve")
    fig.savefig(out)
    plt.close(fig)


def fig1_right(indir: Path, out: Path):
    dom = read_json(indir / "domain.json")
    trace = read_trace(indir / "trace.csv")
    report = read_json(indir / "report.json")
    fig, ax = new_axes()
    lo, hi = np.asarray(dom["min"]), np.asarray(dom["max"])
    ax.plot(
        [lo[0], hi[0], hi[0], lo[0], lo[0]],
        [lo[1], lo[1], hi[1], hi[1], lo[1]],
        color="0.4",
        lw=1,
    )
    p = positions(trace)
    ax.plot(p[:, 0], p[:, 1], ".", color="tab:blue", ms=3, label="curve samples")
    draw_barycenters(ax, report, "tab:red")
    ax.legend(loc="upper left", fontsize=8)
    ax.set_title("unit square: barycenters leave the parabola")
    fig.savefig(out)
    plt.close(fig)


def fig_quadrant(indir: Path, out: Path):
    trace = read_trace(indir / "trace.csv")
    p = positions(trace)
    fig, ax = new_axes()
    lim = float(np.max(p)) * 1.05
    ax.plot([0, lim], [0, lim], color="tab:orange", lw=1.2, label="diagonal")
    ax.plot(p[:, 0], p[:, 1], color="tab:blue", lw=1.4, label="solution")
    ax.set_xlim(0, lim)
    ax.set_ylim(0, lim)
    ax.legend(loc="upper left", fontsize=8)
    ax.set_title("quadrant solution vs diagonal")
    fig.savefig(out)
    plt.close(fig)


def fig_square(indir: Path, out: Path):
    trace = read_trace(indir / "square.csv")
    meta = read_json(indir / "square.json")
    a_len = meta["half_side"]
    p = positions(trace)
    zeta = trace["zeta1"]
    fig, ax = new_axes()
    ax.plot(
        [-a_len, a_len, a_len, -a_len, -a_len],
        [-a_len, -a_len, a_len, a_len, -a_len],
        color="0.3",
        lw=1.2,
    )
    # normal ticks from the emitted angles: N = (-sin zeta, cos zeta)
    step = max(len(p) // 96, 1)
    for i in range(0, len(p), step):
        n = np.array([-np.sin(zeta[i]), np.cos(zeta[i])])
        seg = np.vstack([p[i] - 0.12 * n, p[i] + 0.12 * n])
        ax.plot(seg[:, 0], seg[:, 1], color="black", lw=0.5)
    ax.plot(p[:, 0], p[:, 1], color="tab:red", lw=1.6)
    ax.set_title("closed curve for the square with normals")
    fig.savefig(out)
    plt.close(fig)


def fig_prism(indir: Path, out: Path):
    dom = read_json(indir / "domain.json")
    trace = read_trace(indir / "trace.csv")
    report = read_json(indir / "report.json")
    fig, ax = new_axes(three_d=True)
    base = np.asarray(dom["base"])
    h = dom["height"]
    for z in (0.0, h):
        loop = np.vstack([base, base[:1]])
        ax.plot(loop[:, 0], loop[:, 1], z, color="0.6", lw=1)
    for corner in base:
        ax.plot([corner[0]] * 2, [corner[1]] * 2, [0, h], color="0.6", lw=1)
    for sec in report.get("sections", [])[:: max(len(report.get("sections", [])) // 24, 1)]:
        v = np.asarray(sec["vertices"])
        loop = np.vstack([v, v[:1]])
        ax.plot(loop[:, 0], loop[:, 1], loop[:, 2], color="tab:red", lw=0.7)
    p = positions(trace)
    ax.plot(p[:, 0], p[:, 1], p[:, 2], color="tab:blue", lw=1.6)
    draw_barycenters(ax, report, "tab:green")
    ax.set_box_aspect((1, 1, 1.6))
    ax.set_title("prism: curve, slice triangles, barycenters")
    fig.savefig(out)
    plt.close(fig)


def fig_helix(indir: Path, out: Path):
    files = sorted(indir.glob("helix_*.csv"))
    if not files:
        raise MissingInput(f"missing input file: {indir / 'helix_*.csv'}")
    dom = read_json(indir / "domain.json")
    r = dom["r"]
    fig = plt.figure(figsize=(4.0 * len(files), 5.0), dpi=150)
    for i, f in enumerate(files):
        trace = read_trace(f)
        p = positions(trace)
        ax = fig.add_subplot(1, len(files), i + 1, projection="3d")
        th = np.linspace(0, 2 * np.pi, 60)
        zz = np.linspace(p[:, 2].min(), p[:, 2].max(), 24)
        TH, ZZ = np.meshgrid(th, zz)
        ax.plot_surface(r * np.cos(TH), r * np.sin(TH), ZZ, alpha=0.12, color="goldenrod")
        ax.plot(p[:, 0], p[:, 1], p[:, 2], color="tab:blue", lw=1.4)
        step = max(len(p) // 32, 1)
        ax.plot(p[::step, 0], p[::step, 1], p[::step, 2], ".", color="tab:blue", ms=4)
        ax.set_title(f.stem.replace("p", "."), fontsize=9)
    fig.savefig(out)
    plt.close(fig)


RENDERERS = {
    "fig1-left": fig1_left,
    "fig1-right": fig1_right,
    "fig-quadrant": fig_quadrant,
    "fig-square": fig_square,
    "fig-prism": fig_prism,
    "fig-helix": fig_helix,
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fig", required=True, choices=FIGURE_IDS)
    ap.add_argument("--in", dest="indir", required=True)
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)
    try:
        RENDERERS[args.fig](Path(args.indir), Path(args.out))
    except MissingInput as exc:
        print(f"render {args.fig}: {exc}", file=sys.stderr)
        return 1
    print(f"render {args.fig}: wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
