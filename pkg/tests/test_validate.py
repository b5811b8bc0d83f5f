import json

import numpy as np
import pytest

from pcurves.domain import Ball, Cuboid, Cylinder, DiskSector2D
from pcurves.dynamics import CurveState, SolverConfig, integrate, trace_from_curve
from pcurves.frame import angles_from_tangent
from pcurves.validate import (
    admissibility_check,
    ambiguity_fraction,
    energy,
    full_report,
    max_barycenter_distance,
    project_points,
    projection_index,
    self_consistency_residual,
    voronoi_barycenters,
    write_report,
)

RNG = np.random.default_rng(31)


def make_segment_trace(p0, p1, n=65):
    p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
    length = np.linalg.norm(p1 - p0)
    t = (p1 - p0) / length

    def pos(s):
        return p0 + s * t

    return trace_from_curve(pos, lambda s: t, lambda s: np.zeros_like(t), np.linspace(0, length, n))


@pytest.fixture(scope="module")
def ball_diameter_trace():
    init = CurveState(0.0, np.array([-1.0, 0.0, 0.0]), angles_from_tangent(np.array([1.0, 0.0, 0.0])))
    return integrate(Ball(1.0), init, SolverConfig(max_length=2.0))


# --------------------------------------------------------------------------
# Projection
# --------------------------------------------------------------------------

def test_projection_orthogonal_segment():
    tr = make_segment_trace([0, 0], [1, 0])
    assert projection_index(tr, np.array([0.3, 5.0])) == pytest.approx(0.3, abs=1e-9)
    assert projection_index(tr, np.array([2.0, 0.0])) == pytest.approx(1.0)


def test_projection_total_tie_takes_sup(arc_trace):
    # every arc point is equidistant from the circle center: sup convention
    s = projection_index(arc_trace, np.array([0.0, 0.0]))
    assert s == pytest.approx(arc_trace.length, abs=1e-6)


def test_projection_brute_force_agreement(arc_trace):
    ss = np.linspace(0, arc_trace.length, 10_000)
    curve = arc_trace.position_at(ss)
    for _ in range(200):
        x = RNG.uniform(-0.2, 1.2, 2)
        s_star = projection_index(arc_trace, x)
        d_star = np.linalg.norm(arc_trace.position_at(s_star)[0] - x)
        d_brute = np.min(np.linalg.norm(curve - x, axis=1))
        assert d_star <= d_brute + 1e-9


def test_project_points_matches_projection_index(arc_trace):
    pts = RNG.uniform(-0.2, 1.2, size=(300, 2))
    d2, s = project_points(arc_trace, pts, n_dense=1024)
    for i in range(0, 300, 7):
        s_ref = projection_index(arc_trace, pts[i])
        d_ref = np.linalg.norm(arc_trace.position_at(s_ref)[0] - pts[i])
        assert np.sqrt(d2[i]) == pytest.approx(d_ref, abs=1e-5)


# --------------------------------------------------------------------------
# Residuals
# --------------------------------------------------------------------------

def test_residual_ball_diameter(ball_diameter_trace):
    prof = self_consistency_residual(Ball(1.0), ball_diameter_trace, 16)
    assert max(v for _, v in prof) < 1e-10


def test_residual_arc_is_principal(arc_trace):
    prof = self_consistency_residual(DiskSector2D(1.0), arc_trace, 16)
    assert max(v for _, v in prof) < 1e-10


def test_residual_parabola_not_principal(parabola_trace):
    prof = self_consistency_residual(Cuboid(np.zeros(2), np.ones(2)), parabola_trace, 64)
    assert max(v for _, v in prof) >= 0.01


# --------------------------------------------------------------------------
# Voronoi barycenters
# --------------------------------------------------------------------------

def test_voronoi_ball_diameter(ball_diameter_trace):
    cells = voronoi_barycenters(Ball(1.0), ball_diameter_trace, 32, 10**6, 11)
    assert all(c.count > 0 for c in cells)
    # interior slabs balance on the curve (pure sampling noise at ~31k/cell);
    # the end caps taper toward the poles, displacing their barycenter along
    # the axis by the cap-mean offset h (2/3 - h/4) / (1 - h/3) - h/2 ~ 0.0103
    interior = [c.distance for c in cells[1:-1]]
    assert max(interior) < 0.011
    assert max_barycenter_distance(cells) < 0.015
    h = 2.0 / 32
    cap_offset = h * (2.0 / 3.0 - h / 4.0) / (1.0 - h / 3.0) - h / 2.0
    for c in (cells[0], cells[-1]):
        assert c.distance == pytest.approx(cap_offset, abs=0.0035)


def test_voronoi_arc_quarter_disk(arc_trace):
    prev = None
    for n in (8, 16, 32):
        cells = voronoi_barycenters(DiskSector2D(1.0), arc_trace, n, 10**6, 3)
        worst = max_barycenter_distance(cells)
        assert worst < 0.01
        noise = 3.0 * max(c.stderr for c in cells if not c.empty)
        if prev is not None:
            assert worst <= prev + noise  # monotone trend up to sampling noise
        prev = worst


def test_voronoi_tie_and_empty_handling(arc_trace):
    cells = voronoi_barycenters(DiskSector2D(1.0), arc_trace, 8, 5000, 1)
    assert sum(c.count for c in cells) == 5000
    recs = voronoi_barycenters(Ball(1.0), make_segment_trace([-1, 0, 0], [1, 0, 0]), 4, 50, 2)
    assert all(r.count >= 0 for r in recs)


# --------------------------------------------------------------------------
# Energy and ambiguity
# --------------------------------------------------------------------------

def test_energy_ball_diameter(ball_diameter_trace):
    e, se = energy(Ball(1.0), ball_diameter_trace, 10**6, 7)
    assert abs(e - 0.4) < 3 * se


def test_energy_square_midline():
    tr = make_segment_trace([0.0, 0.5], [1.0, 0.5])
    e, se = energy(Cuboid(np.zeros(2), np.ones(2)), tr, 400_000, 8)
    assert abs(e - 1.0 / 12.0) < 3 * se


def test_energy_rigid_motion_invariance(arc_trace):
    from pcurves.dynamics import rotate_scene

    e1, se1 = energy(DiskSector2D(1.0), arc_trace, 200_000, 4)
    th = 0.4
    q = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    tr_rot, dom_rot = rotate_scene(arc_trace, DiskSector2D(1.0), q)
    e2, se2 = energy(dom_rot, tr_rot, 200_000, 4)
    assert e1 >= 0 and e2 >= 0
    assert abs(e1 - e2) < 3 * np.hypot(se1, se2)


def test_energy_principal_curve_beats_parabola(arc_trace, parabola_in_disk_trace):
    e_arc, se_arc = energy(DiskSector2D(1.0), arc_trace, 300_000, 5)
    e_par, se_par = energy(DiskSector2D(1.0), parabola_in_disk_trace, 300_000, 5)
    assert e_par - e_arc > 3 * np.hypot(se_arc, se_par)
    assert e_arc == pytest.approx(1.0 / 18.0, abs=3 * se_arc + 1e-4)


def test_ambiguity_ball_diameter(ball_diameter_trace):
    frac = ambiguity_fraction(Ball(1.0), ball_diameter_trace, 50_000, 13, tie_tol=1e-9)
    assert frac <= 1e-4


def test_ambiguity_zero_tolerance(arc_trace):
    assert ambiguity_fraction(DiskSector2D(1.0), arc_trace, 20_000, 3, tie_tol=0.0) == 0.0


def test_ambiguity_monotone_in_tolerance(arc_trace):
    lo = ambiguity_fraction(DiskSector2D(1.0), arc_trace, 50_000, 3, tie_tol=1e-9)
    hi = ambiguity_fraction(DiskSector2D(1.0), arc_trace, 50_000, 3, tie_tol=1e-3)
    assert lo <= hi <= 0.01


# --------------------------------------------------------------------------
# Admissibility
# --------------------------------------------------------------------------

def test_admissibility_straight_line_in_cuboid():
    tr = make_segment_trace([0.5, 0.1, 0.5], [0.5, 1.9, 0.5])
    res = admissibility_check(Cuboid(np.zeros(3), np.array([1.0, 2.0, 1.0])), tr, 16)
    assert res.ok


def test_admissibility_detects_plane_crossings():
    # circle of radius 1/2 inside the unit ball: the normal planes of a tight
    # loop all cross near its center, well inside the domain
    def pos(s):
        th = 2 * s
        return 0.5 * np.array([np.cos(th), np.sin(th), 0.0])

    def tan(s):
        th = 2 * s
        return np.array([-np.sin(th), np.cos(th), 0.0])

    def tpr(s):
        th = 2 * s
        return -2 * 0.5 * np.array([np.cos(th), np.sin(th), 0.0]) * 2

    tr = trace_from_curve(pos, tan, tpr, np.linspace(0, np.pi / 2, 33))
    res = admissibility_check(Ball(1.0), tr, 16)
    assert not res.ok


# --------------------------------------------------------------------------
# Reports
# --------------------------------------------------------------------------

def test_full_report_schema(tmp_path, arc_trace):
    rep = full_report(DiskSector2D(1.0), arc_trace, n_s=8, n_nodes=8, n_samples=20_000, seed=0)
    path = tmp_path / "report.json"
    write_report(rep, path)
    data = json.loads(path.read_text())
    assert data["format_version"] == 1
    assert {"residuals", "barycenters", "energy", "ambiguity", "admissible"} <= set(data)
    assert len(data["residuals"][0]) == 2
    cell = data["barycenters"][0]
    assert {"node", "distance", "count", "node_point", "barycenter"} <= set(cell)
    assert data["energy"]["n"] == 20_000
    assert data["admissible"]["ok"] is True
