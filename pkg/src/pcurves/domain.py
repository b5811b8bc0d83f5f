"""Geometric supports of the uniform density and their normal-plane sections.

A Domain is the region carrying the (constant) density; a CrossSection is its
slice by the normal plane of a curve point, expressed in the normal
coordinates u of the accompanying frame.  Sections are what the moment
machinery integrates over.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .errors import (
    EmptySection,
    MissingTruncation,
    SliceHitsBase,
    UnboundedSection,
)
from .frame import Frame

_COLLINEAR_TOL = 1e-12
_DIR_TOL = 1e-12
_BOUNDARY_TOL = 1e-9


# --------------------------------------------------------------------------
# Cross-section types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval2D:
    """Section of a planar domain: u in [u_minus, u_plus]."""

    u_minus: float
    u_plus: float

    def __post_init__(self):
        if not self.u_minus < self.u_plus:
            raise EmptySection(f"empty interval [{self.u_minus}, {self.u_plus}]")


@dataclass(frozen=True)
class PolygonND:
    """Planar polygonal section in u = (u1, u2); stored CCW, collinear vertices removed."""

    vertices: np.ndarray

    def __post_init__(self):
        v = clean_polygon(np.asarray(self.vertices, dtype=float))
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)


@dataclass(frozen=True)
class Ellipse2D:
    """Elliptical section; principal axes rotated by `angle` against the u axes."""

    center: Tuple[float, float]
    semi_axes: Tuple[float, float]
    angle: float = 0.0

    def __post_init__(self):
        if min(self.semi_axes) <= 0:
            raise EmptySection(f"ellipse semi-axes must be positive, got {self.semi_axes}")

    def rotation_matrix(self) -> np.ndarray:
        c, s = np.cos(self.angle), np.sin(self.angle)
        return np.array([[c, -s], [s, c]])

    def contains_u(self, u: np.ndarray) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        w = (u - np.asarray(self.center)) @ self.rotation_matrix()
        p, q = self.semi_axes
        return (w[:, 0] / p) ** 2 + (w[:, 1] / q) ** 2 <= 1.0 + 1e-12


CrossSection = Union[Interval2D, PolygonND, Ellipse2D]


def polygon_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def clean_polygon(v: np.ndarray) -> np.ndarray:
    """Orient CCW and drop repeated/collinear vertices (tolerance 1e-12)."""
    if v.shape[0] >= 3 and polygon_area(v) < 0:
        v = v[::-1]
    scale = max(1.0, float(np.max(np.abs(v)))) if v.size else 1.0
    keep = []
    n = v.shape[0]
    for i in range(n):
        a, b, c = v[i - 1], v[i], v[(i + 1) % n]
        if np.linalg.norm(b - a) < _COLLINEAR_TOL * scale:
            continue
        cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(cross) < _COLLINEAR_TOL * scale * scale:
            continue
        keep.append(i)
    return v[keep] if keep else v


# --------------------------------------------------------------------------
# Domain variants
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Quadrant2D:
    """The unbounded quadrant x1, x2 >= 0."""

    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class Polygon2D:
    """Simple CCW polygon in the plane."""

    vertices: np.ndarray

    def __post_init__(self):
        v = clean_polygon(np.asarray(self.vertices, dtype=float))
        if v.shape[0] < 3:
            raise ValueError("polygon needs at least 3 non-collinear vertices")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class Prism:
    """Right prism over a polygonal base in the x1-x2 plane, x3 in [0, height]."""

    base: np.ndarray
    height: float

    def __post_init__(self):
        if self.height <= 0:
            raise ValueError(f"prism height must be positive, got {self.height}")
        b = clean_polygon(np.asarray(self.base, dtype=float))
        b.setflags(write=False)
        object.__setattr__(self, "base", b)

    @property
    def dim(self) -> int:
        return 3


@dataclass(frozen=True)
class Cylinder:
    """Infinite cylinder x1^2 + x2^2 <= r^2 around the x3-axis."""

    r: float

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError(f"cylinder radius must be positive, got {self.r}")

    @property
    def dim(self) -> int:
        return 3


@dataclass(frozen=True)
class Ball:
    """Closed ball of radius r centered at the origin."""

    r: float
    dim_: int = 3

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError(f"ball radius must be positive, got {self.r}")

    @property
    def dim(self) -> int:
        return self.dim_


@dataclass(frozen=True)
class Cuboid:
    """Axis-aligned box [lo, hi] in any dimension."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.shape != hi.shape or np.any(lo >= hi):
            raise ValueError("cuboid needs lo < hi componentwise")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]


@dataclass(frozen=True)
class DiskSector2D:
    """Circular sector of radius r with polar angle in [theta0, theta1].

    Covers the quarter-disk validation targets; the sweep must stay <= pi so
    sections remain single intervals.
    """

    r: float
    theta0: float = 0.0
    theta1: float = np.pi / 2.0

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("sector radius must be positive")
        if not 0 < self.theta1 - self.theta0 <= np.pi:
            raise ValueError("sector sweep must lie in (0, pi]")

    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class RotatedDomain:
    """Image R . base of a domain under an orthogonal map; used by scene rotations."""

    base: "Domain"
    rotation: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=float)
        r.setflags(write=False)
        object.__setattr__(self, "rotation", r)

    @property
    def dim(self) -> int:
        return self.base.dim


Domain = Union[Quadrant2D, Polygon2D, Prism, Cylinder, Ball, Cuboid, DiskSector2D, RotatedDomain]


# --------------------------------------------------------------------------
# Membership
# --------------------------------------------------------------------------

def contains(dom: Domain, x: np.ndarray) -> Union[bool, np.ndarray]:
    """True iff x lies in the closed domain; accepts (d,) or (n, d) arrays."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    res = _contains(dom, pts)
    return bool(res[0]) if single else res


def _contains(dom: Domain, pts: np.ndarray) -> np.ndarray:
    if isinstance(dom, Quadrant2D):
        return np.all(pts >= -_BOUNDARY_TOL, axis=1)
    if isinstance(dom, Polygon2D):
        return _polygon_contains(dom.vertices, pts)
    if isinstance(dom, Prism):
        in_base = _polygon_contains(dom.base, pts[:, :2])
        return in_base & (pts[:, 2] >= -_BOUNDARY_TOL) & (pts[:, 2] <= dom.height + _BOUNDARY_TOL)
    if isinstance(dom, Cylinder):
        return pts[:, 0] ** 2 + pts[:, 1] ** 2 <= dom.r**2 + _BOUNDARY_TOL
    if isinstance(dom, Ball):
        return np.sum(pts**2, axis=1) <= dom.r**2 + _BOUNDARY_TOL
    if isinstance(dom, Cuboid):
        return np.all((pts >= dom.lo - _BOUNDARY_TOL) & (pts <= dom.hi + _BOUNDARY_TOL), axis=1)
    if isinstance(dom, DiskSector2D):
        rad = np.sum(pts**2, axis=1) <= dom.r**2 + _BOUNDARY_TOL
        # sweep <= pi, so the wedge is the intersection of two half-planes
        n0 = np.array([-np.sin(dom.theta0), np.cos(dom.theta0)])
        n1 = np.array([np.sin(dom.theta1), -np.cos(dom.theta1)])
        return rad & (pts @ n0 >= -_BOUNDARY_TOL) & (pts @ n1 >= -_BOUNDARY_TOL)
    if isinstance(dom, RotatedDomain):
        return _contains(dom.base, pts @ dom.rotation)  # pts @ R == (R^T pts^T)^T
    raise TypeError(f"unsupported domain {type(dom).__name__}")


def _polygon_contains(vertices: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Crossing-number test with a tolerance band at the boundary (closed set)."""
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    n = len(vertices)
    near_edge = np.zeros(len(pts), dtype=bool)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        crosses = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (x < np.where(crosses, xint, np.inf))
        # distance to the edge segment, for the closed-boundary tolerance
        ex, ey = x2 - x1, y2 - y1
        ll = ex * ex + ey * ey
        t = np.clip(((x - x1) * ex + (y - y1) * ey) / ll, 0.0, 1.0)
        d2 = (x1 + t * ex - x) ** 2 + (y1 + t * ey - y) ** 2
        near_edge |= d2 <= _BOUNDARY_TOL**2
    return inside | near_edge


# --------------------------------------------------------------------------
# Cross-sections
# --------------------------------------------------------------------------

def cross_section(dom: Domain, position: np.ndarray, f: Frame) -> CrossSection:
    """Section of dom by the normal plane at `position` in the frame's u coordinates.

    Returns the set {u : position + sum u_i N_i in dom}.
    """
    pos = np.asarray(position, dtype=float)
    if isinstance(dom, Quadrant2D):
        return _section_quadrant(pos, f)
    if isinstance(dom, Polygon2D):
        return _section_polygon2d(dom.vertices, pos, f)
    if isinstance(dom, Prism):
        return _section_prism(dom, pos, f)
    if isinstance(dom, Cylinder):
        return _section_cylinder(dom, pos, f)
    if isinstance(dom, Ball):
        return _section_ball(dom, pos, f)
    if isinstance(dom, Cuboid):
        return _section_cuboid(dom, pos, f)
    if isinstance(dom, DiskSector2D):
        return _section_disk_sector(dom, pos, f)
    if isinstance(dom, RotatedDomain):
        r = dom.rotation
        pulled = Frame(r.T @ f.tangent, (r.T @ f.normals.T).T)
        return cross_section(dom.base, r.T @ pos, pulled)
    raise TypeError(f"unsupported domain {type(dom).__name__}")


def _section_quadrant(pos: np.ndarray, f: Frame) -> Interval2D:
    x1, x2 = pos
    n = f.normals[0]
    sin_z, cos_z = -n[0], n[1]  # N = (-sin z, cos z)
    if sin_z < -_DIR_TOL or cos_z < -_DIR_TOL:
        raise UnboundedSection(f"quadrant section requires zeta in (0, pi/2), normal {n}")
    if sin_z <= _DIR_TOL:  # zeta ~ 0: upper bound x1/sin would blow up
        if abs(x1) > _BOUNDARY_TOL:
            raise UnboundedSection("normal line escapes along the x1 axis")
        return Interval2D(-x2, 0.0)  # 0/0 boundary case, continued by the limit 0
    if cos_z <= _DIR_TOL:  # zeta ~ pi/2
        if abs(x2) > _BOUNDARY_TOL:
            raise UnboundedSection("normal line escapes along the x2 axis")
        return Interval2D(0.0, x1 / sin_z)
    return Interval2D(-x2 / cos_z, x1 / sin_z)


def _section_polygon2d(vertices: np.ndarray, pos: np.ndarray, f: Frame) -> Interval2D:
    n = f.normals[0]
    us = []
    m = len(vertices)
    for i in range(m):
        a = vertices[i]
        b = vertices[(i + 1) % m]
        e = b - a
        det = n[0] * (-e[1]) - n[1] * (-e[0])
        if abs(det) < 1e-14:
            continue
        rhs = a - pos
        u = (rhs[0] * (-e[1]) - rhs[1] * (-e[0])) / det
        t = (n[0] * rhs[1] - n[1] * rhs[0]) / det
        if -1e-12 <= t <= 1.0 + 1e-12:
            us.append(u)
    lo = [u for u in us if u <= 1e-12]
    hi = [u for u in us if u >= -1e-12]
    if not lo or not hi:
        raise EmptySection("normal line does not bracket the position inside the polygon")
    return Interval2D(max(lo), min(hi))


def _section_prism(dom: Prism, pos: np.ndarray, f: Frame) -> PolygonND:
    n1, n2 = f.normals
    verts = []
    heights = []
    for e in dom.base:
        rhs = np.array([e[0], e[1], 0.0]) - pos
        if abs(n2[0]) < 1e-13 and abs(n1[0]) > 1e-13:
            # columns [N1, N2, -e3] are lower triangular: forward substitution
            u1 = rhs[0] / n1[0]
            u2 = (rhs[1] - n1[1] * u1) / n2[1]
            v = n1[2] * u1 + n2[2] * u2 - rhs[2]
        else:
            mat = np.column_stack([n1, n2, [0.0, 0.0, -1.0]])
            u1, u2, v = np.linalg.solve(mat, rhs)
        verts.append((u1, u2))
        heights.append(v)
    heights = np.asarray(heights)
    if np.any(heights < -_BOUNDARY_TOL) or np.any(heights > dom.height + _BOUNDARY_TOL):
        raise SliceHitsBase(
            f"normal plane meets a prism base (edge heights {np.round(heights, 6)}, h={dom.height})"
        )
    return PolygonND(np.asarray(verts))


def _section_cylinder(dom: Cylinder, pos: np.ndarray, f: Frame) -> Ellipse2D:
    n1, n2 = f.normals
    a = np.array([[n1[0], n2[0]], [n1[1], n2[1]]])
    det = np.linalg.det(a)
    if abs(det) < 1e-10:
        raise UnboundedSection("normal plane contains the cylinder axis direction")
    center = -np.linalg.solve(a, pos[:2])
    m = a.T @ a
    lam, vec = np.linalg.eigh(m)
    if np.linalg.det(vec) < 0:
        vec = vec[:, ::-1]
        lam = lam[::-1]
    semi = dom.r / np.sqrt(lam)
    angle = float(np.arctan2(vec[1, 0], vec[0, 0]))
    return Ellipse2D((float(center[0]), float(center[1])), (float(semi[0]), float(semi[1])), angle)


def _section_ball(dom: Ball, pos: np.ndarray, f: Frame):
    proj = float(np.dot(pos, f.tangent))
    rho2 = dom.r**2 - proj**2
    if rho2 <= 0:
        raise EmptySection("normal plane misses the ball")
    rho = float(np.sqrt(rho2))
    offs = -(f.normals @ pos)
    if dom.dim == 2:
        return Interval2D(offs[0] - rho, offs[0] + rho)
    if dom.dim == 3:
        return Ellipse2D((float(offs[0]), float(offs[1])), (rho, rho), 0.0)
    raise TypeError("ball sections implemented for dimensions 2 and 3 only")


def _clip_halfplane(poly, alpha, beta):
    """Keep {u : alpha . u <= beta} of a polygon (Sutherland-Hodgman step)."""
    out = []
    m = len(poly)
    for i in range(m):
        cur, nxt = poly[i], poly[(i + 1) % m]
        c_in = alpha @ cur <= beta
        n_in = alpha @ nxt <= beta
        if c_in:
            out.append(cur)
        if c_in != n_in:
            denom = alpha @ (nxt - cur)
            t = (beta - alpha @ cur) / denom
            out.append(cur + t * (nxt - cur))
    return out


def _section_cuboid(dom: Cuboid, pos: np.ndarray, f: Frame):
    d = dom.dim
    if d == 2:
        n = f.normals[0]
        lo, hi = -np.inf, np.inf
        for j in range(2):
            if abs(n[j]) < 1e-14:
                if not (dom.lo[j] - _BOUNDARY_TOL <= pos[j] <= dom.hi[j] + _BOUNDARY_TOL):
                    raise EmptySection("normal line misses the box")
                continue
            b1 = (dom.lo[j] - pos[j]) / n[j]
            b2 = (dom.hi[j] - pos[j]) / n[j]
            lo = max(lo, min(b1, b2))
            hi = min(hi, max(b1, b2))
        if not np.isfinite(lo) or not np.isfinite(hi) or lo >= hi:
            raise EmptySection("empty box section")
        return Interval2D(lo, hi)
    if d != 3:
        raise TypeError("cuboid sections implemented for dimensions 2 and 3 only")
    n1, n2 = f.normals
    big = float(np.linalg.norm(dom.hi - dom.lo)) + 1.0
    poly = [np.array(p) for p in [(-big, -big), (big, -big), (big, big), (-big, big)]]
    for j in range(3):
        alpha = np.array([n1[j], n2[j]])
        poly = _clip_halfplane(poly, alpha, dom.hi[j] - pos[j])
        if not poly:
            raise EmptySection("empty box section")
        poly = _clip_halfplane(poly, -alpha, pos[j] - dom.lo[j])
        if not poly:
            raise EmptySection("empty box section")
    verts = clean_polygon(np.asarray(poly))
    if len(verts) < 3 or polygon_area(verts) < 1e-14:
        raise EmptySection("degenerate box section")
    return PolygonND(verts)


def _section_disk_sector(dom: DiskSector2D, pos: np.ndarray, f: Frame) -> Interval2D:
    n = f.normals[0]
    pn = float(np.dot(pos, n))
    disc = pn * pn - float(np.dot(pos, pos)) + dom.r**2
    if disc <= 0:
        raise EmptySection("normal line misses the disk")
    lo, hi = -pn - np.sqrt(disc), -pn + np.sqrt(disc)
    for theta, sgn in ((dom.theta0, 1.0), (dom.theta1, -1.0)):
        edge_n = sgn * np.array([-np.sin(theta), np.cos(theta)])  # inward normal
        a = float(np.dot(n, edge_n))
        b = float(np.dot(pos, edge_n))
        if abs(a) < 1e-14:
            if b < -_BOUNDARY_TOL:
                raise EmptySection("normal line outside the sector wedge")
            continue
        bound = -b / a
        if a > 0:
            lo = max(lo, bound)
        else:
            hi = min(hi, bound)
    if lo >= hi:
        raise EmptySection("empty sector section")
    return Interval2D(lo, hi)


# --------------------------------------------------------------------------
# Sampling
# --------------------------------------------------------------------------

def sample_uniform(
    dom: Domain,
    n: int,
    seed: int,
    truncation: Optional[Tuple[float, float]] = None,
) -> np.ndarray:
    """n i.i.d. uniform samples on the domain, deterministic in the seed.

    Unbounded domains (cylinder, quadrant) require a truncation range:
    the x3 interval for the cylinder, a per-axis [lo, hi] for the quadrant.
    """
    rng = np.random.default_rng(seed)
    if isinstance(dom, Cuboid):
        return rng.uniform(dom.lo, dom.hi, size=(n, dom.dim))
    if isinstance(dom, Ball):
        return _rejection(rng, n, -dom.r * np.ones(dom.dim), dom.r * np.ones(dom.dim),
                          lambda p: np.sum(p**2, axis=1) <= dom.r**2)
    if isinstance(dom, Polygon2D):
        lo = dom.vertices.min(axis=0)
        hi = dom.vertices.max(axis=0)
        return _rejection(rng, n, lo, hi, lambda p: _polygon_contains(dom.vertices, p))
    if isinstance(dom, Prism):
        lo2 = dom.base.min(axis=0)
        hi2 = dom.base.max(axis=0)
        xy = _rejection(rng, n, lo2, hi2, lambda p: _polygon_contains(dom.base, p))
        z = rng.uniform(0.0, dom.height, size=n)
        return np.column_stack([xy, z])
    if isinstance(dom, Cylinder):
        if truncation is None:
            raise MissingTruncation("sampling the infinite cylinder needs an x3 range")
        xy = _rejection(rng, n, np.array([-dom.r, -dom.r]), np.array([dom.r, dom.r]),
                        lambda p: np.sum(p**2, axis=1) <= dom.r**2)
        z = rng.uniform(truncation[0], truncation[1], size=n)
        return np.column_stack([xy, z])
    if isinstance(dom, Quadrant2D):
        if truncation is None:
            raise MissingTruncation("sampling the quadrant needs a coordinate range")
        return rng.uniform(truncation[0], truncation[1], size=(n, 2))
    if isinstance(dom, DiskSector2D):
        rad = dom.r * np.sqrt(rng.uniform(size=n))
        ang = rng.uniform(dom.theta0, dom.theta1, size=n)
        return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
    if isinstance(dom, RotatedDomain):
        return sample_uniform(dom.base, n, seed, truncation) @ dom.rotation.T
    raise TypeError(f"unsupported domain {type(dom).__name__}")


def _rejection(rng, n, lo, hi, accept):
    out = np.empty((0, len(lo)))
    while out.shape[0] < n:
        batch = rng.uniform(lo, hi, size=(max(2 * (n - out.shape[0]), 1024), len(lo)))
        out = np.vstack([out, batch[accept(batch)]])
    return out[:n]


def bounding_sphere(dom: Domain):
    """(center, radius) for bounded domains, None if unbounded."""
    if isinstance(dom, Polygon2D):
        c = dom.vertices.mean(axis=0)
        return c, float(np.max(np.linalg.norm(dom.vertices - c, axis=1)))
    if isinstance(dom, Prism):
        c2 = dom.base.mean(axis=0)
        r2 = float(np.max(np.linalg.norm(dom.base - c2, axis=1)))
        c = np.array([c2[0], c2[1], dom.height / 2.0])
        return c, float(np.hypot(r2, dom.height / 2.0))
    if isinstance(dom, Ball):
        return np.zeros(dom.dim), dom.r
    if isinstance(dom, Cuboid):
        c = 0.5 * (dom.lo + dom.hi)
        return c, float(0.5 * np.linalg.norm(dom.hi - dom.lo))
    if isinstance(dom, DiskSector2D):
        return np.zeros(2), dom.r
    if isinstance(dom, RotatedDomain):
        res = bounding_sphere(dom.base)
        if res is None:
            return None
        c, r = res
        return dom.rotation @ c, r
    return None


# --------------------------------------------------------------------------
# JSON interchange
# --------------------------------------------------------------------------

def domain_to_dict(dom: Domain) -> dict:
    if isinstance(dom, Quadrant2D):
        return {"type": "quadrant2d"}
    if isinstance(dom, Polygon2D):
        return {"type": "polygon2d", "vertices": dom.vertices.tolist()}
    if isinstance(dom, Prism):
        return {"type": "prism", "base": dom.base.tolist(), "height": dom.height}
    if isinstance(dom, Cylinder):
        return {"type": "cylinder", "r": dom.r}
    if isinstance(dom, Ball):
        return {"type": "ball", "r": dom.r, "dim": dom.dim}
    if isinstance(dom, Cuboid):
        return {"type": "cuboid", "min": dom.lo.tolist(), "max": dom.hi.tolist()}
    if isinstance(dom, DiskSector2D):
        return {"type": "disk_sector2d", "r": dom.r, "theta0": dom.theta0, "theta1": dom.theta1}
    if isinstance(dom, RotatedDomain):
        return {"type": "rotated", "rotation": dom.rotation.tolist(), "base": domain_to_dict(dom.base)}
    raise TypeError(f"unsupported domain {type(dom).__name__}")


def domain_from_dict(spec: dict) -> Domain:
    kind = spec["type"]
    if kind == "quadrant2d":
        return Quadrant2D()
    if kind == "polygon2d":
        return Polygon2D(np.asarray(spec["vertices"], dtype=float))
    if kind == "prism":
        return Prism(np.asarray(spec["base"], dtype=float), float(spec["height"]))
    if kind == "cylinder":
        return Cylinder(float(spec["r"]))
    if kind == "ball":
        return Ball(float(spec["r"]), int(spec.get("dim", 3)))
    if kind == "cuboid":
        return Cuboid(np.asarray(spec["min"], dtype=float), np.asarray(spec["max"], dtype=float))
    if kind == "disk_sector2d":
        return DiskSector2D(float(spec["r"]), float(spec.get("theta0", 0.0)),
                            float(spec.get("theta1", np.pi / 2.0)))
    if kind == "rotated":
        return RotatedDomain(domain_from_dict(spec["base"]), np.asarray(spec["rotation"], dtype=float))
    raise ValueError(f"unknown domain type {kind!r}")


def load_domain(path) -> Domain:
    with open(path) as fh:
        return domain_from_dict(json.load(fh))


def save_domain(dom: Domain, path) -> None:
    payload = {"format_version": 1, **domain_to_dict(dom)}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
