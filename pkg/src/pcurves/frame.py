"""Spherical-coordinate tangent parameterization and moving orthonormal frames.

The unit tangent of a curve in R^d is written in spherical coordinates
zeta = (zeta_1, ..., zeta_{d-1}),

    T(zeta) = (cos z1, sin z1 cos z2, ..., sin z1 ... sin z_{d-2} cos z_{d-1},
               sin z1 ... sin z_{d-1}),

and the normal vectors are the normalized partial derivatives
N_i = T_{zeta_i} / ||T_{zeta_i}||.  The frame degenerates when one of the
leading sines vanishes; callers receive SingularAngles in that case.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonOrthogonal, SingularAngles, ZeroVector

# |sin zeta_k| below this (k <= d-2) counts as a frame singularity; keeps the
# diagonal scaling D(s)^-1 bounded by 1e6.
SINGULARITY_THRESHOLD = 1e-6

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SphericalAngles:
    """Angle vector zeta parameterizing a unit tangent direction in R^dim.

    angles[0..dim-3] live in [0, pi]; the last angle is wrapped into [0, 2pi).
    """

    angles: np.ndarray
    dim: int

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.angles, dtype=float)).copy()
        if self.dim < 2:
            raise DimensionMismatch(f"ambient dimension must be >= 2, got {self.dim}")
        if a.shape != (self.dim - 1,):
            raise DimensionMismatch(
                f"expected {self.dim - 1} angles for dimension {self.dim}, got shape {a.shape}"
            )
        a[-1] = np.mod(a[-1], TWO_PI)
        if self.dim > 2 and np.any((a[:-1] < -1e-12) | (a[:-1] > np.pi + 1e-12)):
            raise DimensionMismatch(f"leading angles must lie in [0, pi], got {a[:-1]}")
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)

    @classmethod
    def of(cls, *angles: float) -> "SphericalAngles":
        return cls(np.asarray(angles, dtype=float), len(angles) + 1)


@dataclass(frozen=True)
class Frame:
    """Orthonormal frame {T, N_1, ..., N_{d-1}} at a curve point."""

    tangent: np.ndarray
    normals: np.ndarray  # shape (d-1, d)

    def __post_init__(self):
        t = np.asarray(self.tangent, dtype=float)
        n = np.asarray(self.normals, dtype=float)
        t.setflags(write=False)
        n.setflags(write=False)
        object.__setattr__(self, "tangent", t)
        object.__setattr__(self, "normals", n)

    @property
    def dim(self) -> int:
        return self.tangent.shape[0]

    def matrix(self) -> np.ndarray:
        """Rows T, N_1, ..., N_{d-1}."""
        return np.vstack([self.tangent, self.normals])

    def orthonormality_defect(self) -> float:
        m = self.matrix()
        return float(np.max(np.abs(m @ m.T - np.eye(self.dim))))


@dataclass(frozen=True)
class Curvatures:
    """Coordinates of T' in the normal frame."""

    kappa: np.ndarray

    def __post_init__(self):
        k = np.atleast_1d(np.asarray(self.kappa, dtype=float))
        if not np.all(np.isfinite(k)):
            raise ValueError(f"curvature entries must be finite, got {k}")
        k.setflags(write=False)
        object.__setattr__(self, "kappa", k)

    @property
    def total(self) -> float:
        """||T'|| = ||kappa||."""
        return float(np.linalg.norm(self.kappa))


def tangent_from_angles(z: SphericalAngles) -> np.ndarray:
    """Unit tangent T(zeta); components cos z1, sin z1 cos z2, ..."""
    a = z.angles
    sn, cs = np.sin(a), np.cos(a)
    prefix = np.concatenate([[1.0], np.cumprod(sn)])  # prefix[j] = prod_{i<=j} sin z_i
    t = np.empty(z.dim)
    t[:-1] = prefix[:-1] * cs
    t[-1] = prefix[-1]
    return t


def tangent_partial_norms(z: SphericalAngles) -> np.ndarray:
    """(||T_{zeta_1}||, ..., ||T_{zeta_{d-1}}||) = (1, sin z1, sin z1 sin z2, ...)."""
    sn = np.sin(z.angles)
    return np.concatenate([[1.0], np.cumprod(sn[:-1])])


def frame_from_angles(z: SphericalAngles) -> Frame:
    """Frame with T = T(zeta) and N_i the normalized partial derivatives.

    Raises SingularAngles when a leading sine falls below the threshold:
    there the direction of T_{zeta_k} is no longer determined.
    """
    d = z.dim
    a = z.angles
    sn, cs = np.sin(a), np.cos(a)
    if d > 2 and np.min(np.abs(sn[:-1])) < SINGULARITY_THRESHOLD:
        k = int(np.argmin(np.abs(sn[:-1])))
        raise SingularAngles(f"|sin zeta_{k + 1}| = {abs(sn[k]):.2e} below threshold")
    normals = np.zeros((d - 1, d))
    for k in range(d - 1):
        # N_k = (0,...,0, -sin z_k, cos z_k * T(z_{k+1:})) with k leading zeros
        normals[k, k] = -sn[k]
        tail_sn = sn[k + 1:]
        tail_cs = cs[k + 1:]
        prefix = np.concatenate([[1.0], np.cumprod(tail_sn)])
        if len(tail_sn) > 0:
            normals[k, k + 1:-1] = cs[k] * prefix[:-1] * tail_cs
            normals[k, -1] = cs[k] * prefix[-1]
        else:
            normals[k, -1] = cs[k]
    return Frame(tangent_from_angles(z), normals)


def angles_from_tangent(t: np.ndarray) -> SphericalAngles:
    """Invert T(zeta); deterministic zero-tail convention on the singular set.

    zeta_k = atan2(||t_{k+1:}||, t_k) for k < d-1 and the last angle comes from
    atan2 of the trailing pair, so the leading angles land in [0, pi].
    """
    t = np.asarray(t, dtype=float)
    nrm = np.linalg.norm(t)
    if nrm < 1e-12:
        raise ZeroVector("cannot extract a direction from a (near) zero vector")
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"expected unit vector, got norm {nrm!r}")
    d = t.shape[0]
    if d < 2:
        raise DimensionMismatch("need dimension >= 2")
    angles = np.zeros(d - 1)
    # tail_norm[k] = ||t_{k+1:}||, computed back to front for stability
    tail = np.sqrt(np.cumsum(t[::-1] ** 2))[::-1]
    for k in range(d - 2):
        angles[k] = np.arctan2(tail[k + 1], t[k])
    angles[-1] = np.mod(np.arctan2(t[-1], t[-2]), TWO_PI) if tail[d - 2] > 0 else 0.0
    return SphericalAngles(angles, d)


def principal_curvatures(t_prime: np.ndarray, f: Frame) -> Curvatures:
    """kappa_i = <T', N_i>; requires T' orthogonal to the tangent."""
    t_prime = np.asarray(t_prime, dtype=float)
    along = float(np.dot(t_prime, f.tangent))
    scale = max(1.0, float(np.linalg.norm(t_prime)))
    if abs(along) > 1e-8 * scale:
        raise NonOrthogonal(f"<T', T> = {along:.3e}, not orthogonal")
    kappa = f.normals @ t_prime
    recon = kappa @ f.normals
    if np.max(np.abs(recon - t_prime)) > 1e-8 * scale:
        raise NonOrthogonal("T' is not spanned by the normal frame")
    return Curvatures(kappa)


def _bishop_rhs(m: np.ndarray, kappa: np.ndarray) -> np.ndarray:
    """Right-hand side T' = sum kappa_i N_i, N_i' = -kappa_i T for rows of m."""
    out = np.empty_like(m)
    out[0] = kappa @ m[1:]
    out[1:] = -np.outer(kappa, m[0])
    return out


def _gram_schmidt(m: np.ndarray) -> np.ndarray:
    out = m.copy()
    for i in range(out.shape[0]):
        for j in range(i):
            out[i] -= np.dot(out[i], out[j]) * out[j]
        out[i] /= np.linalg.norm(out[i])
    return out


def bishop_propagate(f: Frame, kappa: Curvatures, ds: float) -> Frame:
    """One 4th-order step of the parallel-frame system, re-orthonormalized.

    The continuous system rotates T toward the normals at rates kappa_i while
    each N_i rotates back toward -T; a modified Gram-Schmidt pass removes the
    O(ds^5) drift so the result is orthonormal to roundoff.
    """
    m = f.matrix()
    k = kappa.kappa
    k1 = _bishop_rhs(m, k)
    k2 = _bishop_rhs(m + 0.5 * ds * k1, k)
    k3 = _bishop_rhs(m + 0.5 * ds * k2, k)
    k4 = _bishop_rhs(m + ds * k3, k)
    m = m + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    m = _gram_schmidt(m)
    return Frame(m[0], m[1:])


def orthonormal_completion(tangent: np.ndarray) -> Frame:
    """Deterministic orthonormal frame for an arbitrary unit tangent.

    Prefers the spherical-coordinate frame; falls back to a Householder
    completion when the spherical parameterization is singular.  Used by
    validation code, where any consistent normal frame is acceptable.
    """
    t = np.asarray(tangent, dtype=float)
    try:
        return frame_from_angles(angles_from_tangent(t))
    except SingularAngles:
        pass
    d = t.shape[0]
    # Householder reflection mapping e_1 to t; its remaining columns span T^perp.
    sign = 1.0 if t[0] >= 0 else -1.0
    v = t.copy()
    v[0] += sign
    h = np.eye(d) - 2.0 * np.outer(v, v) / np.dot(v, v)
    normals = (-sign) * h[:, 1:].T
    return Frame(t, normals)
