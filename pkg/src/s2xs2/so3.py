"""Rotations of R^3 and the double cover S^3 -> SO(3).

Rotations are plain ``(3, 3)`` float arrays (or stacks ``(..., 3, 3)``).
The cover sends a unit quaternion ``w`` to the matrix of ``x -> w^-1 x w``
on the imaginary quaternions written in the ordered basis ``(j, i, k)``.
In that basis ``sqrt(j)`` maps to :func:`t_matrix`, and the cover is an
anti-homomorphism: ``rho(pq) = rho(q) rho(p)``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import DegeneratePathError, DomainError
from .quat import I, J, K, UnitQuaternion, rotate_by

ORTHO_REPAIR_TOL = 1e-9
_EXACT_TOL = 1e-13

# Imaginary basis in the order used for matrices: (j, i, k).
_BASIS = (J, I, K)


class PerpPair(NamedTuple):
    """Ordered pair of orthogonal unit vectors; a point of the space ``⊥``."""

    u: np.ndarray
    v: np.ndarray

    @classmethod
    def checked(cls, u, v):
        """Validate (and, within 1e-9, repair) an orthonormal pair."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        nu = np.linalg.norm(u, axis=-1)
        nv = np.linalg.norm(v, axis=-1)
        dot = np.sum(u * v, axis=-1)
        err = np.max(np.abs(np.stack([nu - 1.0, nv - 1.0, dot])))
        if not err < ORTHO_REPAIR_TOL:
            raise DomainError(f"not an orthonormal pair (defect {err:.3g})")
        if err > _EXACT_TOL:
            u = u / nu[..., None]
            v = v - np.sum(u * v, axis=-1, keepdims=True) * u
            v = v / np.linalg.norm(v, axis=-1, keepdims=True)
        return cls(u, v)


def t_matrix():
    """T: e1 -> e1, e2 -> e3, e3 -> -e2."""
    return np.array([[1.0, 0.0, 0.0],
                     [0.0, 0.0, -1.0],
                     [0.0, 1.0, 0.0]])


def _mgs(R):
    """Modified Gram-Schmidt on the columns of a stack of 3x3 matrices."""
    Q = np.array(R, dtype=float, copy=True)
    for k in range(3):
        for m in range(k):
            proj = np.sum(Q[..., :, m] * Q[..., :, k], axis=-1)
            Q[..., :, k] -= proj[..., None] * Q[..., :, m]
        Q[..., :, k] /= np.linalg.norm(Q[..., :, k], axis=-1)[..., None]
    return Q


def as_rotation(R):
    """Return ``R`` as a special orthogonal matrix (stack).

    Matrices within 1e-9 of orthogonal are re-orthonormalised; anything
    further off, or with negative determinant, raises :class:`DomainError`.
    """
    R = np.asarray(R, dtype=float)
    if R.shape[-2:] != (3, 3):
        raise DomainError(f"expected 3x3 matrices, got shape {R.shape}")
    gram = np.swapaxes(R, -1, -2) @ R
    err = float(np.max(np.abs(gram - np.eye(3)))) if R.size else 0.0
    if not err < ORTHO_REPAIR_TOL:
        raise DomainError(f"matrix is not orthogonal (defect {err:.3g})")
    if np.any(np.linalg.det(R) < 0):
        raise DomainError("matrix has determinant -1")
    if err > _EXACT_TOL:
        R = _mgs(R)
    return R


def spin_cover(w):
    """Image of a unit quaternion in SO(3).

    Column ``n`` is ``w^-1 e_n w`` for the basis ``(j, i, k)``, computed by
    quaternion conjugation.  :func:`spin_cover_batch` is the closed-form
    batched version.
    """
    cols = []
    for e in _BASIS:
        x = rotate_by(w, e)
        cols.append([x.c, x.b, x.d])
    return np.array(cols).T


def spin_cover_batch(w):
    return kernels.spin_cover(w)


def canonical_sign(w):
    """Flip rows of ``w`` so the first coefficient above 1e-12 is positive."""
    w = np.array(w, dtype=float, copy=True)
    flat = w.reshape(-1, 4)
    big = np.abs(flat) > 1e-12
    first = np.argmax(big, axis=1)
    lead = flat[np.arange(flat.shape[0]), first]
    flat[lead < 0] *= -1.0
    return flat.reshape(w.shape)


def lift_batch(R):
    """Canonically signed preimages of a stack of rotations."""
    return canonical_sign(kernels.lift(as_rotation(R)))


def lift_rotation(R):
    """Both preimages ``(w, -w)`` of ``R``; ``w`` is canonically signed."""
    R = as_rotation(R)
    if R.shape != (3, 3):
        raise DomainError("lift_rotation takes a single matrix; use lift_batch")
    w = UnitQuaternion.from_array(lift_batch(R))
    return w, -w


def perp_to_rotation(p):
    """Rotation with columns ``(u x v, u, v)``."""
    u, v = PerpPair.checked(*p)
    return np.stack([np.cross(u, v), u, v], axis=-1)


def rotation_to_perp(R):
    R = as_rotation(R)
    return PerpPair(R[..., :, 1], R[..., :, 2])


def involution_defect(R):
    """Frobenius norm of ``R^2 - Id``; zero exactly on involutions and Id."""
    R = np.asarray(R, dtype=float)
    return np.linalg.norm(R @ R - np.eye(3), axis=(-2, -1))


def involution_defect_from_angle(phi):
    """Closed form of :func:`involution_defect` for a rotation by angle ``phi``."""
    return np.sqrt(4.0 * (1.0 - np.cos(2.0 * phi)))


def _endpoint_lifts(R0, R1):
    w0 = lift_batch(R0)
    w1 = lift_batch(R1)
    dot = float(w0 @ w1)
    # |dot| below 1e-12 is the tie case; w1 then keeps its canonical sign
    if dot < -1e-12:
        w1 = -w1
    return w0, w1, float(w0 @ w1)


def geodesic(R0, R1, t):
    """Point at parameter ``t`` of the spherically interpolated path R0 -> R1.

    Both endpoints are lifted, the lift of ``R1`` is chosen with nonnegative
    inner product against the lift of ``R0`` (ties: canonical sign), and the
    great-circle arc on S^3 is projected back through the cover.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t={t!r} outside [0, 1]")
    w0, w1, dot = _endpoint_lifts(R0, R1)
    if dot <= -1.0 + 1e-12:
        raise DegeneratePathError("antipodal lifts")
    omega = math.acos(min(1.0, dot))
    if omega < 1e-12:
        w = (1.0 - t) * w0 + t * w1
    else:
        s = math.sin(omega)
        w = (math.sin((1.0 - t) * omega) * w0 + math.sin(t * omega) * w1) / s
    w /= np.linalg.norm(w)
    return kernels.spin_cover(w)


def geodesic_path(R0, R1, steps):
    """``steps`` equally spaced points t = 0, ..., 1 along :func:`geodesic`."""
    ts = np.linspace(0.0, 1.0, steps)
    return ts, np.stack([geodesic(R0, R1, float(t)) for t in ts])
