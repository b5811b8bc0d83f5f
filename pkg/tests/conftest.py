import numpy as np
import pytest

from pcurves.domain import Quadrant2D

ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {name}: {detail}")
from pcurves.dynamics import CurveState, SolverConfig, integrate, trace_from_curve
from pcurves.frame import SphericalAngles
from pcurves.helix import HelixParams, helix_trace


def make_arc_trace(radius=2.0 / 3.0, sweep=np.pi / 2.0, n=129):
    """Circular arc from angle 0 to `sweep`, arclength parameterized."""

    def pos(s):
        th = s / radius
        return radius * np.array([np.cos(th), np.sin(th)])

    def tan(s):
        th = s / radius
        return np.array([-np.sin(th), np.cos(th)])

    def tpr(s):
        th = s / radius
        return np.array([-np.cos(th), -np.sin(th)]) / radius

    return trace_from_curve(pos, tan, tpr, np.linspace(0.0, radius * sweep, n))


def _parabola_arclength_tables(n=4001):
    ts = np.linspace(0.0, 1.0, n)
    speeds = np.sqrt(1.0 + 4.0 * ts**2)
    ss = np.concatenate([[0.0], np.cumsum(0.5 * (speeds[1:] + speeds[:-1]) * np.diff(ts))])
    return ts, ss


def make_parabola_trace(n=257, rising=True):
    """Arclength-parameterized quarter parabola x2 = x1^2 (or x2 = 1 - x1^2)."""
    ts, ss = _parabola_arclength_tables()
    length = ss[-1]

    def t_of_s(s):
        return np.interp(s, ss, ts)

    if rising:

        def pos(s):
            t = t_of_s(s)
            return np.array([t, t * t])

        def tan(s):
            t = t_of_s(s)
            v = np.array([1.0, 2.0 * t])
            return v / np.linalg.norm(v)

        def tpr(s):
            t = t_of_s(s)
            sp2 = 1.0 + 4.0 * t * t
            return np.array([-4.0 * t, 2.0]) / sp2**1.5

    else:

        def pos(s):
            t = t_of_s(s)
            return np.array([t, 1.0 - t * t])

        def tan(s):
            t = t_of_s(s)
            v = np.array([1.0, -2.0 * t])
            return v / np.linalg.norm(v)

        def tpr(s):
            t = t_of_s(s)
            sp2 = 1.0 + 4.0 * t * t
            return np.array([4.0 * t, -2.0]) / sp2**1.5

    return trace_from_curve(pos, tan, tpr, np.linspace(0.0, length, n))


@pytest.fixture(scope="session")
def arc_trace():
    return make_arc_trace()


@pytest.fixture(scope="session")
def parabola_trace():
    return make_parabola_trace()


@pytest.fixture(scope="session")
def parabola_in_disk_trace():
    return make_parabola_trace(rising=False)


@pytest.fixture(scope="session")
def principal_helix_trace():
    return helix_trace(HelixParams(0.2, 0.5, 1.0), 257, 1.0)


@pytest.fixture(scope="session")
def quadrant_trace_50():
    init = CurveState(0.0, np.array([1.0, 0.0]), SphericalAngles.of(np.pi / 2))
    return integrate(Quadrant2D(), init, SolverConfig(max_length=50.0))


@pytest.fixture(scope="session")
def quadrant_trace_12():
    init = CurveState(0.0, np.array([1.0, 0.0]), SphericalAngles.of(np.pi / 2))
    return integrate(Quadrant2D(), init, SolverConfig(max_length=12.0))
