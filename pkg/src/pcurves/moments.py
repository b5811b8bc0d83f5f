"""Transverse moments of cross-sections and the Gram system for curvatures.

For a cross-section R(s) of the support in normal coordinates u, the moments

    mu_j(s) = int_{R(s)} u^j p(Gamma(s) + sum u_i N_i) du

drive the curve dynamics: the principal curvatures of a self-consistent curve
solve G kappa = mu with G the matrix of second moments and mu the vector of
first moments.  Analytic formulas cover intervals, polygons (via partial
moments of trapezoidal strips) and axis-aligned or rotated ellipses; an
adaptive quadrature path serves as the independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from .domain import CrossSection, Ellipse2D, Interval2D, PolygonND
from .errors import (
    DegenerateInterval,
    DegeneratePolygon,
    InvertedBounds,
    JacobianSignViolation,
    NonConvergence,
    SingularGram,
    ZeroMass,
)
from .frame import Curvatures

QUAD_REL_TOL = 1e-10
QUAD_MAX_DEPTH = 12


@dataclass(frozen=True)
class MomentSet:
    """Mass, first and raw second moments of a section (constant density 1)."""

    mu0: float
    first: np.ndarray
    second: np.ndarray

    def __post_init__(self):
        f = np.atleast_1d(np.asarray(self.first, dtype=float))
        s = np.atleast_2d(np.asarray(self.second, dtype=float))
        f.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "first", f)
        object.__setattr__(self, "second", s)

    @property
    def codim(self) -> int:
        return self.first.shape[0]


@dataclass(frozen=True)
class TransverseStats:
    """Mean and covariance of the transverse density."""

    mean: np.ndarray
    cov: np.ndarray


class PartialMoments(NamedTuple):
    """Strip integrals int_{v1}^{v2} int_{a+b u1}^{c+d u1} u1^j u2^k du2 du1."""

    m10: float
    m20: float
    m11: float
    m01: float
    m02: float


def _strip_moments(a, b, c, d, v1, v2):
    """(m00, m10, m20, m11, m01, m02) of one trapezoidal strip; signed in v."""
    dv1 = v2 - v1
    dv2 = v2**2 - v1**2
    dv3 = v2**3 - v1**3
    dv4 = v2**4 - v1**4
    m00 = (c - a) * dv1 + (d - b) * dv2 / 2.0
    m10 = (d - b) / 3.0 * dv3 + (c - a) / 2.0 * dv2
    m20 = (d - b) / 4.0 * dv4 + (c - a) / 3.0 * dv3
    m11 = (d * d - b * b) / 8.0 * dv4 + (c * d - a * b) / 3.0 * dv3 + (c * c - a * a) / 4.0 * dv2
    m01 = (d * d - b * b) / 6.0 * dv3 + (c * d - a * b) / 2.0 * dv2 + (c * c - a * a) / 2.0 * dv1
    m02 = (
        (d**3 - b**3) / 12.0 * dv4
        + (c * d * d - a * b * b) / 3.0 * dv3
        + (c * c * d - a * a * b) / 2.0 * dv2
        + (c**3 - a**3) / 3.0 * dv1
    )
    return m00, m10, m20, m11, m01, m02


def partial_moments(a: float, b: float, c: float, d_: float, v1: float, v2: float) -> PartialMoments:
    """Exact strip moments; inner u2 runs over [a + b u1, c + d u1], outer u1 over [v1, v2]."""
    if not v1 < v2:
        raise InvertedBounds(f"need v1 < v2, got [{v1}, {v2}]")
    if (a + b * v1 > c + d_ * v1 + 1e-12) or (a + b * v2 > c + d_ * v2 + 1e-12):
        raise InvertedBounds("inner bounds must satisfy a + b*u <= c + d*u on [v1, v2]")
    _, m10, m20, m11, m01, m02 = _strip_moments(a, b, c, d_, v1, v2)
    return PartialMoments(m10, m20, m11, m01, m02)


def moments_interval(u_minus: float, u_plus: float) -> MomentSet:
    """Moments of constant density 1 on [u_minus, u_plus] (the d = 2 case)."""
    if not u_minus < u_plus:
        raise DegenerateInterval(f"need u_minus < u_plus, got [{u_minus}, {u_plus}]")
    w = u_plus - u_minus
    first = (u_plus**2 - u_minus**2) / 2.0
    second = (u_plus**3 - u_minus**3) / 3.0
    return MomentSet(w, np.array([first]), np.array([[second]]))


def moments_polygon(section: PolygonND, d: int = 3) -> MomentSet:
    """Exact moments over a simple polygon in the u1-u2 plane.

    The integral is split along u1 into per-edge trapezoids against the u1
    axis; traversal direction supplies the sign, so the sum telescopes to the
    polygon integral for any simple CCW polygon.
    """
    v = np.asarray(section.vertices, dtype=float)
    if v.shape[0] < 3:
        raise DegeneratePolygon("polygon needs at least 3 vertices")
    m = np.zeros(6)  # m00, m10, m20, m11, m01, m02
    for i in range(v.shape[0]):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % v.shape[0]]
        if x1 == x2:
            continue
        # evaluate the strip in a frame centered on the edge's u1-midpoint:
        # near-vertical edges otherwise blow up intercept * slope powers
        mid = 0.5 * (x1 + x2)
        half = 0.5 * (x2 - x1)
        slope = (y2 - y1) / (x2 - x1)
        c_mid = 0.5 * (y1 + y2)
        m00, m10, m20, m11, m01, m02 = _strip_moments(0.0, 0.0, c_mid, slope, -half, half)
        # translate u1 by +mid; signed v1 -> v2 keeps the traversal orientation
        m -= np.asarray(
            [
                m00,
                m10 + mid * m00,
                m20 + 2.0 * mid * m10 + mid * mid * m00,
                m11 + mid * m01,
                m01,
                m02,
            ]
        )
    m00, m10, m20, m11, m01, m02 = m
    if m00 < 1e-14:
        raise DegeneratePolygon(f"polygon area {m00:.2e} below tolerance")
    return MomentSet(m00, np.array([m10, m01]), np.array([[m20, m11], [m11, m02]]))


def _ellipse_raw_moments(section: Ellipse2D):
    """mu0, first, second, and the raw third-moment tensor of an ellipse."""
    c = np.asarray(section.center, dtype=float)
    p, q = section.semi_axes
    rot = section.rotation_matrix()
    mass = np.pi * p * q
    cov = rot @ np.diag([p * p / 4.0, q * q / 4.0]) @ rot.T
    first = mass * c
    second = mass * (np.outer(c, c) + cov)
    # E[u_i u_j u_k] = c_i c_j c_k + c_i cov_jk + c_j cov_ik + c_k cov_ij
    # (central third moments vanish by symmetry)
    third = np.einsum("i,j,k->ijk", c, c, c)
    third += np.einsum("i,jk->ijk", c, cov)
    third += np.einsum("j,ik->ijk", c, cov)
    third += np.einsum("k,ij->ijk", c, cov)
    third *= mass
    return mass, first, second, third


def ellipse_weight_bound(section: Ellipse2D, kappa: np.ndarray) -> float:
    """max of sum(u_i kappa_i) over the ellipse (linear form over an ellipse)."""
    c = np.asarray(section.center, dtype=float)
    k = np.asarray(kappa, dtype=float)
    rot = section.rotation_matrix()
    radii = np.asarray(section.semi_axes, dtype=float)
    return float(k @ c + np.linalg.norm(radii * (rot.T @ k)))


def moments_ellipse(section: Ellipse2D, weight: Optional[Union[Curvatures, float, np.ndarray]] = None) -> MomentSet:
    """Closed-form moments over an ellipse, optionally weighted by 1 - kappa.u.

    A scalar weight means the classic 1 - kappa*u1 factor; a vector applies the
    full linear Jacobian weight.  The weight must stay positive on the section.
    """
    mass, first, second, third = _ellipse_raw_moments(section)
    if weight is None:
        return MomentSet(mass, first, second)
    if isinstance(weight, Curvatures):
        k = weight.kappa
    else:
        k = np.atleast_1d(np.asarray(weight, dtype=float))
        if k.shape == (1,):
            k = np.array([k[0], 0.0])
    if ellipse_weight_bound(section, k) > 1.0 + 1e-12:
        raise JacobianSignViolation("1 - kappa.u changes sign on the ellipse")
    w_mass = mass - first @ k
    w_first = first - second @ k
    w_second = second - third @ k
    return MomentSet(w_mass, w_first, w_second)


def transverse_stats(m: MomentSet) -> TransverseStats:
    """Mean first/mu0 and covariance second/mu0 - mean mean^T."""
    if m.mu0 <= 0:
        raise ZeroMass(f"section mass {m.mu0} is not positive")
    mean = m.first / m.mu0
    cov = m.second / m.mu0 - np.outer(mean, mean)
    return TransverseStats(mean, cov)


def gram_solve(m: MomentSet) -> Curvatures:
    """Solve G kappa = mu for the principal curvatures of a self-consistent curve."""
    g = m.second
    mu = m.first
    if not np.all(np.isfinite(g)):
        raise SingularGram("Gram matrix has non-finite entries")
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise SingularGram(
            f"Gram matrix not positive definite (cond ~ {np.linalg.cond(g):.2e})"
        ) from None
    kappa = np.linalg.solve(g, mu)
    resid = np.linalg.norm(g @ kappa - mu)
    if resid > 1e-10 * max(np.linalg.norm(mu), 1e-300):
        raise SingularGram(f"Gram solve residual {resid:.2e} too large (cond {np.linalg.cond(g):.2e})")
    return Curvatures(kappa)


# --------------------------------------------------------------------------
# Quadrature oracle
# --------------------------------------------------------------------------

def _monomials(u: np.ndarray, codim: int) -> np.ndarray:
    """Columns [1, u_i..., u_i u_j (i <= j)] evaluated at rows of u."""
    cols = [np.ones(u.shape[0])]
    for i in range(codim):
        cols.append(u[:, i])
    for i in range(codim):
        for j in range(i, codim):
            cols.append(u[:, i] * u[:, j])
    return np.column_stack(cols)


def _assemble(codim: int, vals: np.ndarray) -> MomentSet:
    mu0 = vals[0]
    first = vals[1 : 1 + codim]
    second = np.zeros((codim, codim))
    idx = 1 + codim
    for i in range(codim):
        for j in range(i, codim):
            second[i, j] = second[j, i] = vals[idx]
            idx += 1
    return MomentSet(float(mu0), first, second)


def _integrand_factory(codim, density, kappa):
    def f(u):
        vals = _monomials(u, codim)
        w = np.ones(u.shape[0]) if density is None else np.asarray(density(u), dtype=float)
        if kappa is not None:
            w = w * (1.0 - u @ kappa)
        return vals * w[:, None]

    return f


def _tri_rule(order: int):
    """Duffy-mapped tensor Gauss rule on the reference triangle (0,0),(1,0),(0,1)."""
    x, w = leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    xi, eta = np.meshgrid(x, x, indexing="ij")
    wts = np.outer(w, w) * (1.0 - xi)
    pts = np.column_stack([xi.ravel(), (eta * (1.0 - xi)).ravel()])
    return pts, wts.ravel()


_TRI_PTS, _TRI_WTS = _tri_rule(8)


def _tri_integrate(f, tri):
    a, b, c = tri
    jac = abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    pts = a + np.outer(_TRI_PTS[:, 0], b - a) + np.outer(_TRI_PTS[:, 1], c - a)
    return jac * (_TRI_WTS @ f(pts))


def _tri_adapt(f, tri, tol, depth):
    coarse = _tri_integrate(f, tri)
    a, b, c = tri
    ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    kids = [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
    fine = sum(_tri_integrate(f, k) for k in kids)
    if np.max(np.abs(fine - coarse)) <= tol:
        return fine
    if depth >= QUAD_MAX_DEPTH:
        raise NonConvergence(f"triangle quadrature stalled at depth {depth}")
    return sum(_tri_adapt(f, k, tol / 4.0, depth + 1) for k in kids)


def _ear_clip(vertices: np.ndarray):
    """Triangulate a simple CCW polygon by ear clipping."""
    idx = list(range(len(vertices)))
    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10000:
            raise DegeneratePolygon("ear clipping failed; polygon may be non-simple")
        n = len(idx)
        for pos in range(n):
            i0, i1, i2 = idx[pos - 1], idx[pos], idx[(pos + 1) % n]
            a, b, c = vertices[i0], vertices[i1], vertices[i2]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross <= 0:
                continue
            ear = True
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                if _point_in_triangle(vertices[j], a, b, c):
                    ear = False
                    break
            if ear:
                tris.append((a, b, c))
                del idx[pos]
                break
        else:
            raise DegeneratePolygon("no ear found; polygon may be degenerate")
    tris.append(tuple(vertices[i] for i in idx))
    return tris


def _point_in_triangle(p, a, b, c):
    def side(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    d1, d2, d3 = side(a, b, p), side(b, c, p), side(c, a, p)
    neg = (d1 < 0) or (d2 < 0) or (d3 < 0)
    pos = (d1 > 0) or (d2 > 0) or (d3 > 0)
    return not (neg and pos)


def _interval_rule(f, lo, hi, order=12):
    x, w = leggauss(order)
    u = (0.5 * (x + 1.0) * (hi - lo) + lo)[:, None]
    return 0.5 * (hi - lo) * (w @ f(u))


def _interval_adapt(f, lo, hi, tol, depth):
    coarse = _interval_rule(f, lo, hi)
    mid = 0.5 * (lo + hi)
    fine = _interval_rule(f, lo, mid) + _interval_rule(f, mid, hi)
    if np.max(np.abs(fine - coarse)) <= tol:
        return fine
    if depth >= QUAD_MAX_DEPTH:
        raise NonConvergence(f"interval quadrature stalled at depth {depth}")
    return _interval_adapt(f, lo, mid, tol / 2.0, depth + 1) + _interval_adapt(
        f, mid, hi, tol / 2.0, depth + 1
    )


def _ellipse_quad(f, section: Ellipse2D, n_rad, n_ang):
    c = np.asarray(section.center, dtype=float)
    p, q = section.semi_axes
    rot = section.rotation_matrix()
    # radial nodes via t = rho^2 so the polar area weight is exact
    t, wt = leggauss(n_rad)
    rho = np.sqrt(0.5 * (t + 1.0))
    wr = 0.5 * wt
    phi = np.linspace(0.0, 2.0 * np.pi, n_ang, endpoint=False)
    wphi = 2.0 * np.pi / n_ang
    R, PHI = np.meshgrid(rho, phi, indexing="ij")
    disk = np.column_stack([(R * np.cos(PHI)).ravel(), (R * np.sin(PHI)).ravel()])
    pts = c + (rot @ (disk * np.array([p, q])).T).T
    wts = np.repeat(wr, n_ang) * wphi * 0.5  # dt/2 from t-substitution
    return (p * q) * (wts @ f(pts))


def moments_quadrature(
    section: CrossSection,
    density: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    jacobian_weight: Optional[Union[Curvatures, np.ndarray]] = None,
) -> MomentSet:
    """Adaptive quadrature of the section moments; the oracle for analytic paths.

    Polygons are ear-clipped and integrated by a Duffy tensor rule with
    recursive quartering; ellipses use a polar tensor rule with order doubling;
    intervals use recursive Gauss bisection.  Relative target 1e-10, with
    NonConvergence raised once the refinement budget is exhausted.
    """
    kappa = None
    if jacobian_weight is not None:
        kappa = (
            jacobian_weight.kappa
            if isinstance(jacobian_weight, Curvatures)
            else np.atleast_1d(np.asarray(jacobian_weight, dtype=float))
        )
    if isinstance(section, Interval2D):
        f = _integrand_factory(1, density, kappa)
        rough = _interval_rule(f, section.u_minus, section.u_plus)
        tol = QUAD_REL_TOL * max(np.max(np.abs(rough)), 1e-30)
        vals = _interval_adapt(f, section.u_minus, section.u_plus, tol, 0)
        return _assemble(1, vals)
    if isinstance(section, PolygonND):
        f = _integrand_factory(2, density, kappa)
        tris = _ear_clip(np.asarray(section.vertices, dtype=float))
        rough = sum(_tri_integrate(f, t) for t in tris)
        tol = QUAD_REL_TOL * max(np.max(np.abs(rough)), 1e-30)
        vals = sum(_tri_adapt(f, t, tol / len(tris), 0) for t in tris)
        return _assemble(2, vals)
    if isinstance(section, Ellipse2D):
        f = _integrand_factory(2, density, kappa)
        prev = _ellipse_quad(f, section, 8, 16)
        for level in range(1, QUAD_MAX_DEPTH + 1):
            cur = _ellipse_quad(f, section, 8 * 2**level, 16 * 2**level)
            if np.max(np.abs(cur - prev)) <= QUAD_REL_TOL * max(np.max(np.abs(cur)), 1e-30):
                return _assemble(2, cur)
            prev = cur
        raise NonConvergence("ellipse quadrature did not converge")
    raise TypeError(f"unsupported section type {type(section).__name__}")
