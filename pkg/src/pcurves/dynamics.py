"""The dynamical system whose solutions are self-consistent curves.

The curve advances along its tangent while the tangent angles respond to the
first and second transverse moments of the current cross-section:

    Gamma'(s) = T(zeta(s)),
    zeta_j'(s) = (G^-1 mu)_j / ||T_{zeta_j}||.

Away from frame singularities the right-hand side is smooth; on approach the
scenery (domain plus state) is rotated so the tangent returns to neutral
spherical coordinates, and the rotation is recorded so that reported states
stay in the original coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from . import domain as dom_mod
from .domain import Domain, Ellipse2D, Interval2D, PolygonND, Quadrant2D, RotatedDomain, contains, cross_section
from .errors import (
    DimensionMismatch,
    EmptySection,
    InadmissibleStart,
    NonOrthogonalRotation,
    OutOfDomain,
    PCurvesError,
    SingularAngles,
    SingularGram,
    SliceHitsBase,
    UnboundedSection,
)
from .frame import (
    Curvatures,
    SphericalAngles,
    angles_from_tangent,
    frame_from_angles,
    orthonormal_completion,
    tangent_from_angles,
    tangent_partial_norms,
)
from .moments import gram_solve, moments_ellipse, moments_interval, moments_polygon

_SECTION_ERRORS = (
    EmptySection,
    UnboundedSection,
    SliceHitsBase,
    SingularGram,
    OutOfDomain,
    DimensionMismatch,
)


@dataclass(frozen=True)
class CurveState:
    """Instantaneous state (s, Gamma(s), zeta(s))."""

    s: float
    position: np.ndarray
    angles: SphericalAngles

    def __post_init__(self):
        p = np.asarray(self.position, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "position", p)

    @property
    def tangent(self) -> np.ndarray:
        return tangent_from_angles(self.angles)


@dataclass
class SolverConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    initial_step: float = 1e-3
    max_step: float = np.inf
    max_length: float = 10.0
    singularity_threshold: float = 1e-6
    stop_on_boundary: bool = True

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_length <= 0:
            raise ValueError("max_length must be positive")

    def to_dict(self) -> dict:
        return {
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "initial_step": self.initial_step,
            "max_step": None if math.isinf(self.max_step) else self.max_step,
            "max_length": self.max_length,
            "singularity_threshold": self.singularity_threshold,
            "stop_on_boundary": self.stop_on_boundary,
        }


@dataclass
class CurveTrace:
    """Sampled solution: states at accepted steps plus per-state curvatures.

    Curvature components refer to the frame `orthonormal_completion(tangent)`
    of each state (the spherical frame whenever that is regular).  Positions
    and angles are always in the original, un-rotated coordinates; scene
    rotations applied during integration are listed in `restarts`.
    """

    states: List[CurveState]
    kappas: List[Curvatures]
    restarts: List[Tuple[float, np.ndarray]] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].position.shape[0]

    @property
    def length(self) -> float:
        return self.states[-1].s

    @property
    def ss(self) -> np.ndarray:
        return np.array([st.s for st in self.states])

    @property
    def positions(self) -> np.ndarray:
        return np.array([st.position for st in self.states])

    @property
    def tangents(self) -> np.ndarray:
        return np.array([st.tangent for st in self.states])

    @property
    def kappa_matrix(self) -> np.ndarray:
        return np.array([k.kappa for k in self.kappas])

    def _locate(self, s: np.ndarray) -> np.ndarray:
        ss = self.ss
        idx = np.searchsorted(ss, s, side="right") - 1
        return np.clip(idx, 0, len(ss) - 2)

    def position_at(self, s) -> np.ndarray:
        """Cubic Hermite interpolation; exact tangents serve as derivatives."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        ss, pos, tan = self.ss, self.positions, self.tangents
        i = self._locate(s)
        h = ss[i + 1] - ss[i]
        t = (s - ss[i]) / h
        t2, t3 = t * t, t * t * t
        h00 = 2 * t3 - 3 * t2 + 1
        h10 = t3 - 2 * t2 + t
        h01 = -2 * t3 + 3 * t2
        h11 = t3 - t2
        out = (
            h00[:, None] * pos[i]
            + (h10 * h)[:, None] * tan[i]
            + h01[:, None] * pos[i + 1]
            + (h11 * h)[:, None] * tan[i + 1]
        )
        return out

    def tangent_at(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        ss, pos, tan = self.ss, self.positions, self.tangents
        i = self._locate(s)
        h = ss[i + 1] - ss[i]
        t = (s - ss[i]) / h
        d00 = (6 * t * t - 6 * t) / h
        d10 = 3 * t * t - 4 * t + 1
        d01 = (6 * t - 6 * t * t) / h
        d11 = 3 * t * t - 2 * t
        out = (
            d00[:, None] * pos[i]
            + d10[:, None] * tan[i]
            + d01[:, None] * pos[i + 1]
            + d11[:, None] * tan[i + 1]
        )
        return out / np.linalg.norm(out, axis=1, keepdims=True)

    def kappa_at(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        ss = self.ss
        i = self._locate(s)
        t = (s - ss[i]) / (ss[i + 1] - ss[i])
        km = self.kappa_matrix
        return (1 - t)[:, None] * km[i] + t[:, None] * km[i + 1]

    def nearest_index(self, s: float) -> int:
        return int(np.argmin(np.abs(self.ss - s)))

    def resample_arclength(self, n: int, placement: str = "midpoint") -> np.ndarray:
        """n equal-arclength node values of s; midpoint placement avoids end bias."""
        if placement == "midpoint":
            return (np.arange(n) + 0.5) / n * self.length
        return np.linspace(0.0, self.length, n)


def truncate_trace(trace: CurveTrace, s_end: float) -> CurveTrace:
    """Initial segment of a trace up to s_end, with an interpolated end state."""
    if not 0.0 < s_end <= trace.length:
        raise ValueError(f"s_end {s_end} outside (0, {trace.length}]")
    keep = [i for i, st in enumerate(trace.states) if st.s < s_end - 1e-12]
    states = [trace.states[i] for i in keep]
    kappas = [trace.kappas[i] for i in keep]
    t_end = trace.tangent_at(s_end)[0]
    states.append(CurveState(s_end, trace.position_at(s_end)[0], angles_from_tangent(t_end)))
    kappas.append(Curvatures(trace.kappa_at(s_end)[0]))
    restarts = [(s, q) for s, q in trace.restarts if s < s_end]
    meta = dict(trace.meta)
    meta["truncated_at"] = s_end
    return CurveTrace(states, kappas, restarts, meta)


def min_horizontal_tangent(trace: CurveTrace, s_lo: float, s_hi: float, axis: int = 2) -> float:
    """Arclength in [s_lo, s_hi] minimizing the tangent component transverse to `axis`.

    Locates the event where the curve runs parallel to a coordinate axis
    (e.g. a prism curve returning to vertical); golden-section refinement on
    the interpolated tangent.
    """
    grid = np.linspace(s_lo, s_hi, 512)
    tt = trace.tangent_at(grid)
    horiz = np.linalg.norm(np.delete(tt, axis, axis=1), axis=1)
    i = int(np.argmin(horiz))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    phi = (np.sqrt(5.0) - 1.0) / 2.0

    def f(s):
        t = trace.tangent_at(s)[0]
        return float(np.linalg.norm(np.delete(t, axis)))

    a, b = lo, hi
    c = b - phi * (b - a)
    dd = a + phi * (b - a)
    fc, fd = f(c), f(dd)
    for _ in range(200):
        if b - a < 1e-13 * max(1.0, abs(b)):
            break
        if fc < fd:
            b, dd, fd = dd, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, dd, fd
            dd = a + phi * (b - a)
            fd = f(dd)
    return 0.5 * (a + b)


def trace_from_curve(
    position: Callable[[np.ndarray], np.ndarray],
    tangent: Callable[[np.ndarray], np.ndarray],
    tangent_prime: Callable[[np.ndarray], np.ndarray],
    s_grid: np.ndarray,
    meta: Optional[dict] = None,
) -> CurveTrace:
    """Build a trace from an analytically known arclength-parameterized curve."""
    states = []
    kappas = []
    for s in np.asarray(s_grid, dtype=float):
        t = np.asarray(tangent(s), dtype=float)
        t = t / np.linalg.norm(t)
        ang = angles_from_tangent(t)
        f = orthonormal_completion(t)
        tp = np.asarray(tangent_prime(s), dtype=float)
        tp = tp - np.dot(tp, t) * t  # enforce exact orthogonality against roundoff
        kappas.append(Curvatures(f.normals @ tp))
        states.append(CurveState(float(s), np.asarray(position(s), dtype=float), ang))
    return CurveTrace(states, kappas, [], meta or {"source": "analytic"})


# --------------------------------------------------------------------------
# Right-hand sides
# --------------------------------------------------------------------------

def section_moments(sec):
    """Analytic moments for any cross-section kind (unweighted density 1)."""
    if isinstance(sec, Interval2D):
        return moments_interval(sec.u_minus, sec.u_plus)
    if isinstance(sec, PolygonND):
        return moments_polygon(sec)
    if isinstance(sec, Ellipse2D):
        return moments_ellipse(sec)
    raise TypeError(f"unsupported section {type(sec).__name__}")


def _rhs_full(dom: Domain, state: CurveState):
    f = frame_from_angles(state.angles)
    sec = cross_section(dom, state.position, f)
    kappa = gram_solve(section_moments(sec))
    norms = tangent_partial_norms(state.angles)
    return f.tangent, kappa.kappa / norms, kappa


def rhs_general(dom: Domain, state: CurveState):
    """(dGamma/ds, dzeta/ds) of the moment-driven system at the given state."""
    dpos, dzeta, _ = _rhs_full(dom, state)
    return dpos, dzeta


_QUAD_BAND_X2 = 1e-10
_QUAD_BAND_ZETA = 1e-8


def rhs_quadrant_xz(x1: float, x2: float, zeta: float):
    """(dx1, dx2, dzeta) of the specialized quadrant system.

    The interior formula is the moment quotient in a form multiplied through
    by sin^2 cos^2, which stays finite up to the axis; at the corner state
    (x2 = 0, zeta = pi/2) the continuous continuation -1/(2 x1) applies.

    Note: the continuation is the root of the fixed-point equation obtained
    by l'Hospital; the positive root makes the section collapse and the
    system leave zeta <= pi/2 immediately, so the negative branch is the one
    consistent with the interior dynamics.
    """
    if x1 <= 0 or x2 < -1e-12 or not (0.0 < zeta <= np.pi / 2 + 1e-12):
        raise OutOfDomain(f"state (x1={x1}, x2={x2}, zeta={zeta}) outside the quadrant regime")
    if abs(x2) < _QUAD_BAND_X2 and abs(zeta - np.pi / 2) < _QUAD_BAND_ZETA:
        return math.cos(zeta), math.sin(zeta), -0.5 / x1
    sn, cs = math.sin(zeta), math.cos(zeta)
    a = x1 * cs
    b = x2 * sn
    den = a * a - a * b + b * b
    dzeta = 1.5 * sn * cs * (a - b) / den
    return cs, sn, dzeta


def rhs_quadrant(state: CurveState):
    """Quadrant system as a state-based right-hand side."""
    x1, x2 = state.position
    zeta = float(state.angles.angles[0])
    return rhs_quadrant_xz(x1, x2, zeta)


# --------------------------------------------------------------------------
# Scene rotations
# --------------------------------------------------------------------------

def rotation_between(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Orthogonal matrix mapping unit vector a to unit vector b.

    Rotates in span{a, b} and fixes the orthogonal complement; for a ~ -b the
    rotation is routed through an intermediate axis to stay well conditioned.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = a.shape[0]
    c = float(np.dot(a, b))
    if c < -1.0 + 1e-12:
        mid = np.zeros(d)
        mid[int(np.argmin(np.abs(a)))] = 1.0
        mid -= np.dot(mid, a) * a
        mid /= np.linalg.norm(mid)
        return rotation_between(mid, b) @ rotation_between(a, mid)
    v = b - c * a
    vn = np.linalg.norm(v)
    if vn < 1e-15:
        return np.eye(d)
    v /= vn
    s = math.sqrt(max(0.0, 1.0 - c * c))
    rot = np.eye(d)
    rot += (c - 1.0) * (np.outer(a, a) + np.outer(v, v))
    rot += s * (np.outer(v, a) - np.outer(a, v))
    return rot


def neutral_angles(d: int) -> SphericalAngles:
    return SphericalAngles(np.full(d - 1, np.pi / 2.0), d)


def rotate_scene(trace: CurveTrace, dom: Domain, rotation: np.ndarray) -> Tuple[CurveTrace, Domain]:
    """Rotate a whole trace and its domain by an orthogonal matrix."""
    q = np.asarray(rotation, dtype=float)
    d = q.shape[0]
    if np.max(np.abs(q.T @ q - np.eye(d))) > 1e-12:
        raise NonOrthogonalRotation("rotation matrix is not orthogonal within 1e-12")
    states = []
    kappas = []
    for st, ka in zip(trace.states, trace.kappas):
        t_old = st.tangent
        f_old = orthonormal_completion(t_old)
        tprime_old = ka.kappa @ f_old.normals
        t_new = q @ t_old
        ang_new = angles_from_tangent(t_new)
        f_new = orthonormal_completion(t_new)
        kappas.append(Curvatures(f_new.normals @ (q @ tprime_old)))
        states.append(CurveState(st.s, q @ st.position, ang_new))
    if isinstance(dom, dom_mod.Ball):
        new_dom: Domain = dom
    elif np.max(np.abs(q - np.eye(d))) < 1e-15:
        new_dom = dom
    elif isinstance(dom, RotatedDomain):
        new_dom = RotatedDomain(dom.base, q @ dom.rotation)
    else:
        new_dom = RotatedDomain(dom, q)
    return CurveTrace(states, kappas, list(trace.restarts), dict(trace.meta)), new_dom


# --------------------------------------------------------------------------
# Adaptive embedded Runge-Kutta 5(4), Dormand-Prince coefficients
# --------------------------------------------------------------------------

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)

_RESTART_FACTOR = 100.0  # rotate the scene well before the frame threshold bites


class _StopIntegration(Exception):
    def __init__(self, reason):
        self.reason = reason


def integrate(dom: Domain, init: CurveState, cfg: SolverConfig) -> CurveTrace:
    """Solve the curve system from `init` until a stop event or max_length.

    Stop events (recorded in meta["stop_reason"]): "length_budget",
    "left_domain", "step_underflow", or the section error that blocked
    further progress.  Scene rotations triggered near frame singularities are
    recorded in the returned trace; reported states are always in the
    original coordinates.
    """
    d = init.position.shape[0]
    quadrant = isinstance(dom, Quadrant2D)
    q_acc = np.eye(d)  # original -> current working coordinates
    work_dom: Domain = dom

    stats = {"n_steps": 0, "n_rejected": 0, "n_rhs": 0, "n_restarts": 0}
    restarts: List[Tuple[float, np.ndarray]] = []

    def pack(pos, ang):
        return np.concatenate([pos, ang])

    def rhs(y):
        stats["n_rhs"] += 1
        pos, ang = y[:d], y[d:]
        state = CurveState(0.0, pos, SphericalAngles(ang.copy(), d))
        if quadrant:
            dx1, dx2, dz = rhs_quadrant_xz(pos[0], pos[1], float(ang[0]))
            return np.array([dx1, dx2, dz]), Curvatures(np.array([dz]))
        dpos, dzeta, kappa = _rhs_full(work_dom, state)
        return np.concatenate([dpos, dzeta]), kappa

    def to_original(pos, ang):
        p = q_acc.T @ pos
        t = q_acc.T @ tangent_from_angles(SphericalAngles(ang.copy(), d))
        return p, angles_from_tangent(t)

    def record(s, y, kappa):
        pos, ang = y[:d], y[d:]
        p_orig, a_orig = to_original(pos, ang)
        if stats["n_restarts"] == 0:
            k_orig = kappa
        else:
            f_work = orthonormal_completion(tangent_from_angles(SphericalAngles(ang.copy(), d)))
            tprime = kappa.kappa @ f_work.normals
            f_orig = orthonormal_completion(tangent_from_angles(a_orig))
            k_orig = Curvatures(f_orig.normals @ (q_acc.T @ tprime))
        states.append(CurveState(s, p_orig, a_orig))
        kappas.append(k_orig)

    def needs_rotation(ang):
        if d == 2:
            return False
        return float(np.min(np.abs(np.sin(ang[:-1])))) < _RESTART_FACTOR * cfg.singularity_threshold

    def apply_rotation(s, y):
        nonlocal q_acc, work_dom
        t_cur = tangent_from_angles(SphericalAngles(y[d:].copy(), d))
        q_step = rotation_between(t_cur, tangent_from_angles(neutral_angles(d)))
        q_acc = q_step @ q_acc
        work_dom = RotatedDomain(dom, q_acc) if not isinstance(dom, dom_mod.Ball) else dom
        restarts.append((s, q_step))
        stats["n_restarts"] += 1
        new_pos = q_step @ y[:d]
        return pack(new_pos, neutral_angles(d).angles)

    # --- initial state, with boundary inset and rotation fallbacks ----------
    y = pack(init.position, init.angles.angles)
    s = 0.0
    meta = {"config": cfg.to_dict(), "boundary_inset": 0.0}
    if needs_rotation(y[d:]):
        y = apply_rotation(0.0, y)
    try:
        f0, k0 = rhs(y)
    except _SECTION_ERRORS + (SingularAngles,):
        inset = 1e-9
        y_try = y.copy()
        y_try[:d] = y[:d] + inset * tangent_from_angles(SphericalAngles(y[d:].copy(), d))
        try:
            f0, k0 = rhs(y_try)
        except PCurvesError as exc:
            raise InadmissibleStart(f"right-hand side undefined at the initial state: {exc}") from exc
        y = y_try
        meta["boundary_inset"] = inset

    states: List[CurveState] = []
    kappas: List[Curvatures] = []
    record(s, y, k0)

    h = min(cfg.initial_step, cfg.max_step, cfg.max_length)
    err_prev = 1.0
    h_min_floor = 1e-13

    try:
        while s < cfg.max_length - 1e-14:
            h = min(h, cfg.max_step, cfg.max_length - s)
            k = [f0]
            y_new = None
            try:
                for i in range(1, 7):
                    yi = y + h * sum(a * ki for a, ki in zip(_DP_A[i], k))
                    fi, _ = rhs(yi)
                    k.append(fi)
                y5 = y + h * sum(b * ki for b, ki in zip(_DP_B5[:6], k[:6]))
                f5, kappa5 = rhs(y5)
                k[6] = f5
                y_new = y5
            except SingularAngles:
                if needs_rotation(y[d:]):
                    y = apply_rotation(s, y)
                    f0, _ = rhs(y)
                    continue
                stats["n_rejected"] += 1
                h *= 0.5
                if h < h_min_floor * max(1.0, abs(s)):
                    raise _StopIntegration("singular_frame")
                continue
            except _SECTION_ERRORS as exc:
                stats["n_rejected"] += 1
                h *= 0.5
                if h < h_min_floor * max(1.0, abs(s)):
                    raise _StopIntegration(type(exc).__name__)
                continue

            err_vec = h * sum((b5 - b4) * ki for b5, b4, ki in zip(_DP_B5, _DP_B4, k))
            scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))

            if err <= 1.0:
                if cfg.stop_on_boundary and not contains(work_dom, y_new[:d]):
                    stats["n_rejected"] += 1
                    h *= 0.5
                    if h < h_min_floor * max(1.0, abs(s)):
                        raise _StopIntegration("left_domain")
                    continue
                s += h
                y = y_new
                f0 = f5
                stats["n_steps"] += 1
                record(s, y, kappa5)
                if needs_rotation(y[d:]):
                    y = apply_rotation(s, y)
                    f0, _ = rhs(y)
                # PI step-size controller
                fac = 0.9 * err ** (-0.7 / 5.0) * err_prev ** (0.4 / 5.0)
                err_prev = max(err, 1e-10)
                h *= min(5.0, max(0.2, fac))
            else:
                stats["n_rejected"] += 1
                h *= min(1.0, max(0.2, 0.9 * err ** (-0.2)))
                if h < h_min_floor * max(1.0, abs(s)):
                    raise _StopIntegration("step_underflow")
        stop_reason = "length_budget"
    except _StopIntegration as stop:
        stop_reason = stop.reason

    if len(states) < 2:
        raise InadmissibleStart(f"integration could not leave the initial state ({stop_reason})")

    meta.update(stats)
    meta["stop_reason"] = stop_reason
    return CurveTrace(states, kappas, restarts, meta)
