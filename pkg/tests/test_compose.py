import numpy as np
import pytest

from pcurves.compose import compose_square, find_diagonal_crossing
from pcurves.dynamics import CurveState, SolverConfig, integrate
from pcurves.domain import Quadrant2D
from pcurves.errors import IncompatibleTruncation
from pcurves.frame import SphericalAngles
from pcurves.traceio import read_trace_csv, write_trace_csv


def test_crossing_lands_on_diagonal_direction(quadrant_trace_12):
    s_star, y = find_diagonal_crossing(quadrant_trace_12, 1)
    assert 4.0 < s_star < 4.4
    assert abs(y[2] - np.pi / 4) < 1e-12


def test_compose_closed_and_symmetric(quadrant_trace_12):
    closed = compose_square(quadrant_trace_12, 1)
    pts = closed.positions
    assert closed.meta["closure_gap"] <= 1e-8
    a_len = closed.meta["half_side"]
    assert np.max(np.abs(pts)) <= a_len + 1e-9
    # dihedral-8 symmetry: the point set maps onto itself under x <-> y
    mirrored = pts @ np.array([[0.0, 1.0], [1.0, 0.0]])
    d = np.min(
        np.linalg.norm(pts[None, :, :] - mirrored[:, None, :], axis=2), axis=1
    )
    assert d.max() < 1e-8
    # joints along the walk stay continuous
    gaps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    assert gaps.max() < 0.6
    assert np.all(np.diff(closed.ss) > 0)


def test_compose_scaling_family():
    # by degree -1 homogeneity the composed square scales with the start point
    sides = {}
    for x0 in (0.5, 1.0):
        init = CurveState(0.0, np.array([x0, 0.0]), SphericalAngles.of(np.pi / 2))
        tr = integrate(Quadrant2D(), init, SolverConfig(max_length=8.0 * x0))
        sides[x0] = compose_square(tr, 1).meta["half_side"]
    assert sides[0.5] == pytest.approx(0.5 * sides[1.0], rel=1e-6)


def test_compose_requires_crossing():
    init = CurveState(0.0, np.array([1.0, 0.0]), SphericalAngles.of(np.pi / 2))
    short = integrate(Quadrant2D(), init, SolverConfig(max_length=2.0))
    with pytest.raises(IncompatibleTruncation):
        compose_square(short, 1)


def test_trace_csv_roundtrip_bit_for_bit(tmp_path, quadrant_trace_12):
    path = tmp_path / "trace.csv"
    write_trace_csv(quadrant_trace_12, path)
    back = read_trace_csv(path)
    assert np.array_equal(back.positions, quadrant_trace_12.positions)
    assert np.array_equal(back.ss, quadrant_trace_12.ss)
    assert np.array_equal(back.kappa_matrix, quadrant_trace_12.kappa_matrix)
    angles = np.array([st.angles.angles for st in quadrant_trace_12.states])
    angles_back = np.array([st.angles.angles for st in back.states])
    assert np.array_equal(angles, angles_back)


def test_trace_csv_roundtrip_3d(tmp_path, principal_helix_trace):
    path = tmp_path / "helix.csv"
    write_trace_csv(principal_helix_trace, path)
    back = read_trace_csv(path)
    assert np.array_equal(back.positions, principal_helix_trace.positions)
    assert back.dim == 3
    header = path.read_text().splitlines()[1]
    assert header == "s,x1,x2,x3,zeta1,zeta2,kappa1,kappa2"
    assert path.read_text().startswith("# format_version: 1")
