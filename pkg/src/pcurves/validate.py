"""Empirical checks that a curve is principal for a uniform density.

Everything here treats the trace as ground truth and interrogates it
stochastically or through quadrature: residuals of the self-consistency
integral, barycenters of sampled Voronoi cells, the projection energy, and
admissibility diagnostics (Jacobian positivity, normal planes staying
disjoint inside the domain).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .domain import (
    Ball,
    Cylinder,
    Domain,
    Ellipse2D,
    Interval2D,
    PolygonND,
    Quadrant2D,
    RotatedDomain,
    bounding_sphere,
    contains,
    cross_section,
    sample_uniform,
)
from .dynamics import CurveTrace
from .errors import PCurvesError, SliceHitsBase
from .frame import Curvatures, orthonormal_completion
from .moments import ellipse_weight_bound, moments_quadrature

FORMAT_VERSION = 1


@dataclass
class CellRecord:
    node: int
    s: float
    count: int
    distance: float
    stderr: float
    node_point: np.ndarray
    barycenter: Optional[np.ndarray]

    @property
    def empty(self) -> bool:
        return self.count == 0


@dataclass
class AdmissibilityResult:
    ok: bool
    reason: str = ""
    s: Optional[float] = None
    sections: List[dict] = field(default_factory=list)


@dataclass
class ValidationReport:
    residual_profile: List[Tuple[float, float]]
    barycenters: List[CellRecord]
    energy: Tuple[float, float, int]
    ambiguity_fraction: float
    admissible: AdmissibilityResult

    def max_residual(self) -> float:
        return max((r for _, r in self.residual_profile), default=np.nan)

    def max_barycenter_distance(self) -> float:
        ds = [c.distance for c in self.barycenters if not c.empty]
        return max(ds) if ds else np.nan

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "residuals": [[s, v] for s, v in self.residual_profile],
            "barycenters": [
                {
                    "node": c.node,
                    "s": c.s,
                    "count": c.count,
                    "distance": None if c.empty else c.distance,
                    "stderr": None if c.empty else c.stderr,
                    "node_point": c.node_point.tolist(),
                    "barycenter": None if c.barycenter is None else c.barycenter.tolist(),
                }
                for c in self.barycenters
            ],
            "energy": {"mean": self.energy[0], "stderr": self.energy[1], "n": self.energy[2]},
            "ambiguity": self.ambiguity_fraction,
            "admissible": {
                "ok": self.admissible.ok,
                "reason": self.admissible.reason,
                "s": self.admissible.s,
            },
            "sections": self.admissible.sections,
        }


def write_report(report: ValidationReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")


# --------------------------------------------------------------------------
# Projection
# --------------------------------------------------------------------------

def _golden_min(f, lo, hi, iters=80):
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if b - a < 1e-14 * max(1.0, abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def projection_index(trace: CurveTrace, x: np.ndarray) -> float:
    """Largest arclength attaining the minimum distance from x to the curve.

    Coarse scan over the trace nodes brackets every local minimum; each
    bracket is polished by golden-section search plus a bisection pass on the
    distance derivative (golden alone stalls at sqrt(eps) on flat minima).
    Ties within 1e-9 of the best distance resolve to the largest s.
    """
    x = np.asarray(x, dtype=float)
    ss = trace.ss
    d = np.linalg.norm(trace.positions - x, axis=1)
    n = len(ss)

    def dist(s):
        return float(np.linalg.norm(trace.position_at(s)[0] - x))

    def slope(s):
        # d/ds |x - Gamma|^2 up to the factor -2
        return float(np.dot(x - trace.position_at(s)[0], trace.tangent_at(s)[0]))

    def polish(lo, hi):
        s_g = _golden_min(dist, lo, hi)
        g_lo, g_hi = slope(lo), slope(hi)
        if g_lo > 0 > g_hi:
            a, b = lo, hi
            for _ in range(100):
                mid = 0.5 * (a + b)
                if slope(mid) > 0:
                    a = mid
                else:
                    b = mid
                if b - a < 1e-15 * max(1.0, abs(b)):
                    break
            return 0.5 * (a + b)
        return s_g

    candidates = [(0.0, d[0] if ss[0] == 0 else dist(0.0)), (ss[-1], d[-1])]
    for i in range(n):
        left = d[i] <= d[i - 1] if i > 0 else True
        right = d[i] <= d[i + 1] if i < n - 1 else True
        if left and right:
            lo = ss[max(i - 1, 0)]
            hi = ss[min(i + 1, n - 1)]
            s_star = polish(lo, hi) if hi > lo else ss[i]
            candidates.append((s_star, dist(s_star)))
    best = min(v for _, v in candidates)
    return max(s for s, v in candidates if v <= best + 1e-9)


def _dense_polyline(trace: CurveTrace, n: int = 256) -> Tuple[np.ndarray, np.ndarray]:
    s = np.linspace(0.0, trace.length, max(n, 2))
    return s, trace.position_at(s)


def project_points(
    trace: CurveTrace, pts: np.ndarray, n_dense: int = 256, block: int = 65536
) -> Tuple[np.ndarray, np.ndarray]:
    """(squared distance, arclength) of the nearest curve point, vectorized.

    Same geometric rule as projection_index, evaluated against the densely
    resampled polyline: nearest dense node first, then exact point-segment
    distance on the adjacent segments.  Agreement with projection_index is
    covered by tests; use this path for Monte-Carlo workloads.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    s_nodes, p_nodes = _dense_polyline(trace, n_dense)
    m = len(s_nodes)
    seg_p0 = p_nodes[:-1]
    seg_dp = np.diff(p_nodes, axis=0)
    seg_l2 = np.maximum(np.sum(seg_dp**2, axis=1), 1e-300)
    d2_out = np.empty(len(pts))
    s_out = np.empty(len(pts))
    for lo in range(0, len(pts), block):
        x = pts[lo : lo + block]
        d2n = (
            np.sum(x**2, axis=1)[:, None]
            - 2.0 * x @ p_nodes.T
            + np.sum(p_nodes**2, axis=1)[None, :]
        )
        j = np.argmin(d2n, axis=1)
        best_d2 = np.full(len(x), np.inf)
        best_s = np.zeros(len(x))
        for off in (-2, -1, 0, 1):
            k = np.clip(j + off, 0, m - 2)
            p0 = seg_p0[k]
            dp = seg_dp[k]
            t = np.clip(np.sum((x - p0) * dp, axis=1) / seg_l2[k], 0.0, 1.0)
            q = p0 + t[:, None] * dp
            d2 = np.sum((x - q) ** 2, axis=1)
            upd = d2 < best_d2
            best_d2[upd] = d2[upd]
            best_s[upd] = s_nodes[k[upd]] + t[upd] * (s_nodes[k[upd] + 1] - s_nodes[k[upd]])
        d2_out[lo : lo + block] = best_d2
        s_out[lo : lo + block] = best_s
    return d2_out, s_out


# --------------------------------------------------------------------------
# Self-consistency residuals
# --------------------------------------------------------------------------

def _sample_nodes(trace: CurveTrace, n_s: int) -> List[int]:
    grid = trace.resample_arclength(n_s)
    idx = []
    for s in grid:
        i = trace.nearest_index(s)
        if not idx or idx[-1] != i:
            idx.append(i)
    return idx


def self_consistency_residual(dom: Domain, trace: CurveTrace, n_s: int = 64):
    """Norms of the weighted first section moments at n_s curve points.

    Evaluation happens at the stored states nearest to a uniform arclength
    grid, where position, angles and curvature are known exactly; the moments
    carry the Jacobian weight 1 - sum u_i kappa_i.  Zero residual (up to
    quadrature and solver tolerance) characterizes a principal curve.
    """
    profile = []
    for i in _sample_nodes(trace, n_s):
        st = trace.states[i]
        ka = trace.kappas[i]
        f = orthonormal_completion(st.tangent)
        try:
            sec = cross_section(dom, st.position, f)
            m = moments_quadrature(sec, jacobian_weight=ka)
        except PCurvesError as exc:
            raise type(exc)(f"{exc} (at s = {st.s:.6g})") from exc
        profile.append((st.s, float(np.linalg.norm(m.first))))
    return profile


# --------------------------------------------------------------------------
# Monte-Carlo Voronoi barycenters
# --------------------------------------------------------------------------

def voronoi_barycenters(
    dom: Domain,
    trace: CurveTrace,
    n_nodes: int,
    n_samples: int,
    seed: int,
    truncation=None,
) -> List[CellRecord]:
    """Distance from each sampled Voronoi cell's barycenter to its curve node.

    Nodes sit at midpoint arclength positions (no end bias); each Monte-Carlo
    sample joins the cell of its nearest node, ties resolving to the larger
    index.  Empty cells are flagged with count 0 rather than raising.
    """
    s_nodes = trace.resample_arclength(n_nodes)
    nodes = trace.position_at(s_nodes)
    pts = sample_uniform(dom, n_samples, seed, truncation)
    records = []
    sums = np.zeros((n_nodes, pts.shape[1]))
    sqsums = np.zeros(n_nodes)
    counts = np.zeros(n_nodes, dtype=np.int64)
    block = 262144
    for lo in range(0, len(pts), block):
        x = pts[lo : lo + block]
        d2 = (
            np.sum(x**2, axis=1)[:, None]
            - 2.0 * x @ nodes.T
            + np.sum(nodes**2, axis=1)[None, :]
        )
        # argmin of the reversed axis returns the LAST minimum: sup convention
        j = n_nodes - 1 - np.argmin(d2[:, ::-1], axis=1)
        np.add.at(sums, j, x)
        np.add.at(counts, j, 1)
        np.add.at(sqsums, j, np.sum(x**2, axis=1))
    for i in range(n_nodes):
        if counts[i] == 0:
            records.append(CellRecord(i, float(s_nodes[i]), 0, np.nan, np.nan, nodes[i], None))
            continue
        bary = sums[i] / counts[i]
        var = max(sqsums[i] / counts[i] - float(bary @ bary), 0.0)
        rec = CellRecord(
            node=i,
            s=float(s_nodes[i]),
            count=int(counts[i]),
            distance=float(np.linalg.norm(bary - nodes[i])),
            stderr=float(np.sqrt(var / counts[i])),
            node_point=nodes[i],
            barycenter=bary,
        )
        records.append(rec)
    return records


def max_barycenter_distance(records: Sequence[CellRecord]) -> float:
    return max(c.distance for c in records if not c.empty)


# --------------------------------------------------------------------------
# Energy and ambiguity
# --------------------------------------------------------------------------

def energy(
    dom: Domain,
    trace: CurveTrace,
    n_samples: int,
    seed: int,
    truncation=None,
    n_dense: int = 512,
) -> Tuple[float, float]:
    """Monte-Carlo estimate (mean, stderr) of E ||X - Gamma(lambda(X))||^2."""
    pts = sample_uniform(dom, n_samples, seed, truncation)
    d2, _ = project_points(trace, pts, n_dense=n_dense)
    return float(np.mean(d2)), float(np.std(d2) / np.sqrt(len(d2)))


def ambiguity_fraction(
    dom: Domain,
    trace: CurveTrace,
    n_samples: int,
    seed: int,
    tie_tol: float = 1e-9,
    truncation=None,
    n_dense: int = 256,
) -> float:
    """Fraction of samples whose two best distinct projection minima nearly tie.

    Local minima are read off the distance profile along the densely sampled
    curve; adjacent-node minima belong to the same basin and never count as
    distinct.  An upper-bound proxy for the measure of the ambiguity set.
    """
    pts = sample_uniform(dom, n_samples, seed, truncation)
    _, p_nodes = _dense_polyline(trace, n_dense)
    m = len(p_nodes)
    n_amb = 0
    block = 16384
    for lo in range(0, len(pts), block):
        x = pts[lo : lo + block]
        d = np.sqrt(
            np.maximum(
                np.sum(x**2, axis=1)[:, None]
                - 2.0 * x @ p_nodes.T
                + np.sum(p_nodes**2, axis=1)[None, :],
                0.0,
            )
        )
        is_min = np.ones(d.shape, dtype=bool)
        is_min[:, 1:] &= d[:, 1:] <= d[:, :-1]
        is_min[:, :-1] &= d[:, :-1] <= d[:, 1:]
        vals = np.where(is_min, d, np.inf)
        i1 = np.argmin(vals, axis=1)
        d1 = vals[np.arange(len(x)), i1]
        for off in (-1, 0, 1):
            k = np.clip(i1 + off, 0, m - 1)
            vals[np.arange(len(x)), k] = np.inf
        d2 = np.min(vals, axis=1)
        n_amb += int(np.sum((d2 - d1) < tie_tol))
    return n_amb / len(pts)


# --------------------------------------------------------------------------
# Admissibility
# --------------------------------------------------------------------------

def _section_weight_max(sec, kappa: Curvatures) -> float:
    k = kappa.kappa
    if isinstance(sec, Interval2D):
        return float(max(k[0] * sec.u_minus, k[0] * sec.u_plus))
    if isinstance(sec, PolygonND):
        return float(np.max(sec.vertices @ k))
    if isinstance(sec, Ellipse2D):
        return ellipse_weight_bound(sec, k)
    raise TypeError(f"unsupported section {type(sec).__name__}")


_INTERIOR_MARGIN = 1e-6


def _strictly_inside(dom: Domain, pts: np.ndarray, margin: float = _INTERIOR_MARGIN) -> np.ndarray:
    """Containment with a small interior margin, probed coordinatewise.

    Boundary contacts (e.g. all normal lines of an arc meeting at a corner of
    the domain) do not count as interior intersections.
    """
    pts = np.atleast_2d(pts)
    ok = np.ones(len(pts), dtype=bool)
    d = pts.shape[1]
    for j in range(d):
        for sgn in (-1.0, 1.0):
            probe = pts.copy()
            probe[:, j] += sgn * margin
            ok &= np.asarray(contains(dom, probe))
    return ok


def _line_hits_domain(dom: Domain, x0: np.ndarray, v: np.ndarray) -> bool:
    """Whether the line x0 + t v passes through the domain's interior."""
    v = v / np.linalg.norm(v)
    if isinstance(dom, RotatedDomain):
        return _line_hits_domain(dom.base, dom.rotation.T @ x0, dom.rotation.T @ v)
    if isinstance(dom, Ball):
        perp = x0 - np.dot(x0, v) * v
        return float(np.linalg.norm(perp)) < dom.r - _INTERIOR_MARGIN
    if isinstance(dom, Cylinder):
        p, w = x0[:2], v[:2]
        wn = np.linalg.norm(w)
        if wn < 1e-12:
            return float(np.linalg.norm(p)) < dom.r - _INTERIOR_MARGIN
        return abs(p[0] * w[1] - p[1] * w[0]) / wn < dom.r - _INTERIOR_MARGIN
    if isinstance(dom, Quadrant2D):
        t_range = 10.0 * (np.linalg.norm(x0) + 1.0)
        ts = np.linspace(-t_range, t_range, 1024)
        return bool(np.any(_strictly_inside(dom, x0[None, :] + ts[:, None] * v[None, :])))
    sphere = bounding_sphere(dom)
    if sphere is None:
        raise TypeError(f"no line test for {type(dom).__name__}")
    c, r = sphere
    t_mid = float(np.dot(c - x0, v))
    ts = np.linspace(t_mid - r - 1.0, t_mid + r + 1.0, 1024)
    return bool(np.any(_strictly_inside(dom, x0[None, :] + ts[:, None] * v[None, :])))


def admissibility_check(dom: Domain, trace: CurveTrace, n_s: int = 64) -> AdmissibilityResult:
    """Jacobian positivity plus disjointness of consecutive sampled normal planes.

    Reports the first violation; also refuses prism traces whose slices meet
    the bases.  Section geometry at the sampled states is retained (in world
    coordinates for planar polygon sections) for report output.
    """
    idx = _sample_nodes(trace, n_s)
    planes = []
    sections = []
    for i in idx:
        st = trace.states[i]
        ka = trace.kappas[i]
        f = orthonormal_completion(st.tangent)
        planes.append((st.s, st.position, st.tangent))
        try:
            sec = cross_section(dom, st.position, f)
        except SliceHitsBase as exc:
            return AdmissibilityResult(False, f"slice hits base: {exc}", st.s, sections)
        except PCurvesError as exc:
            return AdmissibilityResult(False, f"section failed: {exc}", st.s, sections)
        if isinstance(sec, PolygonND):
            world = st.position[None, :] + sec.vertices @ f.normals
            sections.append({"s": st.s, "vertices": world.tolist()})
        wmax = _section_weight_max(sec, ka)
        if wmax > 1.0 + 1e-9:  # non-negativity: touching zero is allowed
            return AdmissibilityResult(
                False, f"Jacobian weight 1 - u.kappa reaches {1.0 - wmax:.3e}", st.s, sections
            )
    d = trace.dim
    for (s1, p1, t1), (s2, p2, t2) in zip(planes[:-1], planes[1:]):
        if d == 2:
            mat = np.vstack([t1, t2])
            det = np.linalg.det(mat)
            if abs(det) < 1e-12:
                continue
            x = np.linalg.solve(mat, np.array([t1 @ p1, t2 @ p2]))
            hit = bool(_strictly_inside(dom, x[None, :])[0])
        else:
            v = np.cross(t1, t2)
            nv = np.linalg.norm(v)
            if nv < 1e-12:
                continue
            a = np.vstack([t1, t2])
            x, *_ = np.linalg.lstsq(a, np.array([t1 @ p1, t2 @ p2]), rcond=None)
            hit = _line_hits_domain(dom, x, v / nv)
        if hit:
            return AdmissibilityResult(
                False, f"normal planes at s = {s1:.4g} and {s2:.4g} intersect inside the domain",
                s1, sections,
            )
    return AdmissibilityResult(True, "", None, sections)


# --------------------------------------------------------------------------
# Full report
# --------------------------------------------------------------------------

def full_report(
    dom: Domain,
    trace: CurveTrace,
    n_s: int = 64,
    n_nodes: int = 32,
    n_samples: int = 100_000,
    seed: int = 0,
    tie_tol: float = 1e-9,
    truncation=None,
) -> ValidationReport:
    residuals = self_consistency_residual(dom, trace, n_s)
    cells = voronoi_barycenters(dom, trace, n_nodes, n_samples, seed, truncation)
    en = energy(dom, trace, n_samples, seed + 1, truncation)
    amb = ambiguity_fraction(dom, trace, min(n_samples, 100_000), seed + 2, tie_tol, truncation)
    adm = admissibility_check(dom, trace, n_s)
    return ValidationReport(residuals, cells, (en[0], en[1], n_samples), amb, adm)
