"""Assembly of the closed square curve from one quadrant solution.

A quadrant solution started perpendicular to the x1-axis meets the direction
of the diagonal at a discrete set of arclengths.  Cutting at such a point
yields a right-triangle domain for which the piece is principal; reflecting
the piece through the dihedral mirrors of a square chains eight congruent
copies into a closed curve.  The cut must land on zeta = pi/4 to solver
accuracy, otherwise the eight tangents kink at the joints.
"""

from __future__ import annotations

from typing import List, Tuple

import numpy as np

from .dynamics import CurveState, CurveTrace, rhs_quadrant_xz
from .errors import IncompatibleTruncation
from .frame import Curvatures, angles_from_tangent

_J = np.array([[0.0, -1.0], [1.0, 0.0]])  # +90 degree rotation: N = J T


def _rk4_quadrant(y: np.ndarray, length: float, n_steps: int = 2048) -> np.ndarray:
    h = length / n_steps
    y = y.copy()
    for _ in range(n_steps):
        k1 = np.array(rhs_quadrant_xz(*y))
        k2 = np.array(rhs_quadrant_xz(*(y + 0.5 * h * k1)))
        k3 = np.array(rhs_quadrant_xz(*(y + 0.5 * h * k2)))
        k4 = np.array(rhs_quadrant_xz(*(y + h * k3)))
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def find_diagonal_crossing(trace: CurveTrace, which: int = 1) -> Tuple[float, np.ndarray]:
    """(s*, state (x1, x2, zeta)) of the which-th zeta = pi/4 crossing.

    The bracketing node comes from the stored trace; the crossing is then
    polished by Newton iterations on re-integrated short segments, so the
    returned angle matches pi/4 to solver accuracy.
    """
    z = np.array([st.angles.angles[0] for st in trace.states])
    ss = trace.ss
    diffs = z - np.pi / 4.0
    crossings = np.nonzero(np.diff(np.sign(diffs)) != 0)[0]
    if len(crossings) < which:
        raise IncompatibleTruncation(
            f"trace has {len(crossings)} diagonal-direction crossings, needed {which}"
        )
    i = int(crossings[which - 1])
    y0 = np.array([*trace.states[i].position, z[i]])
    # Newton on delta: zeta(y0 integrated by delta) = pi/4
    delta = float((ss[i + 1] - ss[i]) * diffs[i] / (diffs[i] - diffs[i + 1]))
    for _ in range(8):
        y = _rk4_quadrant(y0, delta)
        g = y[2] - np.pi / 4.0
        if abs(g) < 1e-13:
            break
        dz = rhs_quadrant_xz(*y)[2]
        delta -= g / dz
    y = _rk4_quadrant(y0, delta)
    return float(ss[i] + delta), y


def _piece_samples(trace: CurveTrace, s_star: float, y_star: np.ndarray, n_fill: int = 33):
    """Positions, tangents and T' of the truncated piece, ending exactly at the cut."""
    keep = [k for k, st in enumerate(trace.states) if st.s < s_star - 1e-12]
    ss = [trace.states[k].s for k in keep]
    pos = [trace.states[k].position for k in keep]
    zs = [float(trace.states[k].angles.angles[0]) for k in keep]
    # fill the last stored gap by short fixed-step integration for smooth joints
    y = np.array([*pos[-1], zs[-1]])
    s_base = ss[-1]
    gap = s_star - s_base
    for j in range(1, n_fill):
        frac = j / n_fill
        yj = _rk4_quadrant(y, gap * frac, n_steps=256)
        ss.append(s_base + gap * frac)
        pos.append(yj[:2])
        zs.append(yj[2])
    ss.append(s_star)
    pos.append(y_star[:2])
    zs.append(y_star[2])
    ss = np.asarray(ss)
    pos = np.asarray(pos)
    zs = np.asarray(zs)
    tan = np.column_stack([np.cos(zs), np.sin(zs)])
    dz = np.array([rhs_quadrant_xz(p[0], p[1], z)[2] for p, z in zip(pos, zs)])
    tprime = dz[:, None] * (tan @ _J.T)
    return ss, pos, tan, tprime


def compose_square(trace: CurveTrace, which: int = 1) -> CurveTrace:
    """Closed curve for the square of half-side A = x1* + x2* at the cut.

    The piece is placed in the triangle {0 <= y <= x <= A} of the square
    [-A, A]^2 and reflected around: mirrors alternate between diagonals and
    axes, each reflection sharing its endpoint with the previous piece.
    """
    s_star, y_star = find_diagonal_crossing(trace, which)
    if abs(y_star[2] - np.pi / 4.0) > 1e-9:
        raise IncompatibleTruncation(
            f"cut angle differs from the diagonal by {y_star[2] - np.pi / 4.0:.2e}"
        )
    a_len = float(y_star[0] + y_star[1])
    ss, pos, tan, tprime = _piece_samples(trace, s_star, y_star)

    # into the fundamental triangle of the square: (x, y) -> (A - x, y)
    refl = np.diag([-1.0, 1.0])
    cur_pos = pos @ refl.T + np.array([a_len, 0.0])
    cur_tan = tan @ refl.T
    cur_tp = tprime @ refl.T

    mirrors = []
    for vec in [(1.0, 1.0), (0.0, 1.0), (-1.0, 1.0), (1.0, 0.0)] * 2:
        v = np.asarray(vec) / np.linalg.norm(vec)
        mirrors.append(2.0 * np.outer(v, v) - np.eye(2))
    mirrors = mirrors[:7]

    all_pos: List[np.ndarray] = [cur_pos]
    all_tan: List[np.ndarray] = [cur_tan]
    all_tp: List[np.ndarray] = [cur_tp]
    for mir in mirrors:
        cur_pos = (cur_pos @ mir.T)[::-1]
        cur_tan = -(cur_tan @ mir.T)[::-1]  # reversal flips the tangent
        cur_tp = (cur_tp @ mir.T)[::-1]
        all_pos.append(cur_pos)
        all_tan.append(cur_tan)
        all_tp.append(cur_tp)

    states = []
    kappas = []
    s_acc = 0.0
    piece_len = float(ss[-1])
    for p_idx, (pp, tt, tp) in enumerate(zip(all_pos, all_tan, all_tp)):
        local = ss if p_idx % 2 == 0 else piece_len - ss[::-1]
        for j in range(len(pp)):
            if p_idx > 0 and j == 0:
                continue  # joint point already emitted by the previous piece
            t = tt[j] / np.linalg.norm(tt[j])
            n = _J @ t
            states.append(CurveState(s_acc + local[j], pp[j], angles_from_tangent(t)))
            kappas.append(Curvatures(np.array([float(tp[j] @ n)])))
        s_acc += piece_len
    meta = {
        "source": "square-compose",
        "half_side": a_len,
        "cut_s": s_star,
        "closure_gap": float(np.linalg.norm(all_pos[-1][-1] - all_pos[0][0])),
    }
    return CurveTrace(states, kappas, [], meta)
