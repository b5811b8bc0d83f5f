"""Closed-form analysis of helices inside the infinite cylinder.

The arclength helix H(s) = (a cos ks, a sin ks, bks), k = 1/sqrt(a^2+b^2),
has constant curvature a k^2 and torsion b k^2.  Its normal-plane slice of
the cylinder of radius r is the ellipse (a - u1)^2 + (b k u2)^2 <= r^2 in
Frenet coordinates, and the curvature-weighted mean offset of that slice has
the closed form u1_bar = a (1 - r^2 / (4 b^2)), u2_bar = 0.  The helix is
self-consistent exactly when the offset vanishes: b = r/2 with a <= r/4 so
the Jacobian weight stays positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from .domain import Ellipse2D
from .dynamics import CurveTrace, trace_from_curve
from .errors import JacobianSignViolation, OutOfRegime, ZeroPitch
from .frame import Frame
from .moments import moments_quadrature


@dataclass(frozen=True)
class HelixParams:
    a: float
    b: float
    r: float

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or (self.a == 0 and self.b == 0):
            raise ValueError(f"need a, b >= 0 and not both zero, got a={self.a}, b={self.b}")
        if self.r <= 0:
            raise ValueError(f"cylinder radius must be positive, got {self.r}")

    @property
    def k(self) -> float:
        return 1.0 / math.hypot(self.a, self.b)

    @property
    def curvature(self) -> float:
        return self.a * self.k**2

    @property
    def torsion(self) -> float:
        return self.b * self.k**2

    @property
    def period(self) -> float:
        """Arclength of one full turn."""
        return 2.0 * math.pi / self.k


def helix_state(p: HelixParams, s: float) -> Tuple[np.ndarray, Frame]:
    """Point H(s) and the Frenet frame (T, N, B) at arclength s."""
    k = p.k
    ks = k * s
    c, sn = math.cos(ks), math.sin(ks)
    h = np.array([p.a * c, p.a * sn, p.b * ks])
    t = np.array([-p.a * k * sn, p.a * k * c, p.b * k])
    n = np.array([-c, -sn, 0.0])
    bvec = np.array([p.b * k * sn, -p.b * k * c, p.a * k])
    return h, Frame(t, np.array([n, bvec]))


def helix_trace(p: HelixParams, n_nodes: int = 256, periods: float = 1.0) -> CurveTrace:
    """Analytic trace over the given number of turns, starting at H(0)."""
    k = p.k
    s_grid = np.linspace(0.0, periods * p.period, n_nodes)

    def pos(s):
        return helix_state(p, s)[0]

    def tan(s):
        return helix_state(p, s)[1].tangent

    def tprime(s):
        ks = k * s
        return p.a * k * k * np.array([-math.cos(ks), -math.sin(ks), 0.0])

    return trace_from_curve(pos, tan, tprime, s_grid, {"source": "helix", "a": p.a, "b": p.b})


def section_ellipse(p: HelixParams) -> Ellipse2D:
    """The cylinder slice in Frenet normal coordinates."""
    if p.b <= 0:
        raise ZeroPitch("the normal plane of a circle contains the axis; no bounded slice")
    return Ellipse2D((p.a, 0.0), (p.r, p.r / (p.b * p.k)), 0.0)


def jacobian_bound(p: HelixParams) -> float:
    """max kappa * u1 over the slice; must stay <= 1 for the weight to be a density."""
    return p.curvature * (p.a + p.r)


def mean_offset_closed_form(p: HelixParams) -> Tuple[float, float]:
    """(u1_bar, u2_bar) = (a (1 - r^2/(4 b^2)), 0)."""
    if p.b <= 0:
        raise ZeroPitch("closed form requires positive pitch")
    return p.a * (1.0 - p.r**2 / (4.0 * p.b**2)), 0.0


def mean_offset_quadrature(p: HelixParams) -> Tuple[float, float]:
    """Numeric (u1_bar, u2_bar) over the slice with the weight 1 - kappa u1."""
    if jacobian_bound(p) > 1.0 + 1e-12:
        raise JacobianSignViolation(
            f"kappa (a + r) = {jacobian_bound(p):.4f} > 1; weighted mean undefined"
        )
    m = moments_quadrature(section_ellipse(p), jacobian_weight=np.array([p.curvature, 0.0]))
    return float(m.first[0] / m.mu0), float(m.first[1] / m.mu0)


def _mean_offset_clipped(a: float, b: float, r: float, order: int = 64) -> float:
    """u1_bar over the slice clipped to the region where 1 - kappa u1 >= 0.

    Reduces to a 1-d integral: the inner u2 extent of the ellipse is symmetric,
    so u2 integrates to its width.  The substitution u1 = a - r cos(phi) makes
    the integrand a trigonometric polynomial, which the Gauss rule resolves to
    machine accuracy; the clip point splits the range where needed.
    """
    k2 = 1.0 / (a * a + b * b)
    kappa = a * k2
    u_hi = min(a + r, 1.0 / kappa)
    if u_hi <= a - r:
        raise JacobianSignViolation("weight negative on the whole slice")
    phi_hi = math.acos(min(1.0, max(-1.0, (a - u_hi) / r)))
    x, w = leggauss(order)
    phi = 0.5 * phi_hi * (x + 1.0)
    wq = 0.5 * phi_hi * w
    u1 = a - r * np.cos(phi)
    width_times_du = (r * np.sin(phi)) ** 2  # half-width * du1/dphi, common 2/(bk) dropped
    wgt = (1.0 - kappa * u1) * width_times_du
    a0 = float(wq @ wgt)
    m1 = float(wq @ (u1 * wgt))
    return m1 / a0


def principal_pitch_search(a: float, r: float, tol: float = 1e-12) -> Optional[float]:
    """Pitch b making the helix (a, b) self-consistent in the cylinder of radius r.

    For a <= r/4 the closed form gives b = r/2 exactly.  Beyond that the mean
    offset is evaluated with the Jacobian-positivity clip and the root located
    by bisection on (0, r/2]; None means the offset never changes sign there,
    which is a reported outcome rather than an error.
    """
    if a < 0:
        raise OutOfRegime("helix radius a must be nonnegative")
    if a >= 2.0 * r / 3.0:
        raise OutOfRegime(f"a = {a} outside the searchable regime a < 2r/3 = {2 * r / 3:.4g}")
    if a <= r / 4.0:
        return r / 2.0
    eps = 1e-6 * r
    bs = np.linspace(eps, r / 2.0, 128)
    vals = np.array([_mean_offset_clipped(a, b, r) for b in bs])
    sign_flip = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
    if len(sign_flip) == 0:
        return None
    lo, hi = bs[sign_flip[0]], bs[sign_flip[0] + 1]
    flo = vals[sign_flip[0]]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = _mean_offset_clipped(a, mid, r)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
