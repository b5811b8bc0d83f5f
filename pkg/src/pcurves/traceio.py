"""Trace interchange: CSV rows at 17 significant digits plus a JSON sidecar.

Header: s,x1,...,xd,zeta1,...,zeta{d-1},kappa1,...,kappa{d-1}.  A leading
comment line carries the format version; parsed floats round-trip exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import numpy as np

from .dynamics import CurveState, CurveTrace
from .frame import Curvatures, SphericalAngles

FORMAT_VERSION = 1


def trace_header(d: int) -> str:
    cols = ["s"]
    cols += [f"x{i + 1}" for i in range(d)]
    cols += [f"zeta{i + 1}" for i in range(d - 1)]
    cols += [f"kappa{i + 1}" for i in range(d - 1)]
    return ",".join(cols)


def write_trace_csv(trace: CurveTrace, path) -> None:
    d = trace.dim
    with open(path, "w") as fh:
        fh.write(f"# format_version: {FORMAT_VERSION}\n")
        fh.write(trace_header(d) + "\n")
        for st, ka in zip(trace.states, trace.kappas):
            row = [st.s, *st.position, *st.angles.angles, *ka.kappa]
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_trace_csv(path) -> CurveTrace:
    lines = Path(path).read_text().splitlines()
    rows = []
    header = None
    for ln in lines:
        if not ln or ln.startswith("#"):
            continue
        if header is None:
            header = ln.split(",")
            continue
        rows.append([float(v) for v in ln.split(",")])
    if header is None or not rows:
        raise ValueError(f"no trace data in {path}")
    d = sum(1 for c in header if c.startswith("x"))
    if len(header) != 1 + d + 2 * (d - 1):
        raise ValueError(f"malformed trace header {header}")
    data = np.asarray(rows)
    states = []
    kappas = []
    for row in data:
        s = row[0]
        pos = row[1 : 1 + d]
        zeta = row[1 + d : d + d]
        kap = row[d + d : d + d + d - 1]
        states.append(CurveState(float(s), pos, SphericalAngles(zeta, d)))
        kappas.append(Curvatures(kap))
    return CurveTrace(states, kappas, [], {"source": str(path)})


def write_trace_sidecar(trace: CurveTrace, dom_dict: dict, path) -> None:
    payload = {
        "format_version": FORMAT_VERSION,
        "domain": dom_dict,
        "config": trace.meta.get("config"),
        "stop_reason": trace.meta.get("stop_reason"),
        "restarts": [
            {"s": s, "rotation": np.asarray(q).tolist()} for s, q in trace.restarts
        ],
        "stats": {
            k: trace.meta.get(k)
            for k in ("n_steps", "n_rejected", "n_rhs", "n_restarts", "boundary_inset")
            if k in trace.meta
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_trace_sidecar(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
