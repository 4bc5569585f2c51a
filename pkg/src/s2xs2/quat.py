"""Quaternions in the fixed basis (1, i, j, k).

Scalar values are small immutable dataclasses; batched arrays of shape
``(..., 4)`` go through :mod:`s2xs2.kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

UNIT_REPAIR_TOL = 1e-9


@dataclass(frozen=True)
class Quaternion:
    a: float
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    @classmethod
    def from_array(cls, arr):
        a, b, c, d = (float(x) for x in arr)
        return cls(a, b, c, d)

    def as_array(self):
        return np.array([self.a, self.b, self.c, self.d])

    def __iter__(self):
        return iter((self.a, self.b, self.c, self.d))

    def __neg__(self):
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __add__(self, other):
        return Quaternion(self.a + other.a, self.b + other.b,
                          self.c + other.c, self.d + other.d)

    def __sub__(self, other):
        return Quaternion(self.a - other.a, self.b - other.b,
                          self.c - other.c, self.d - other.d)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return quat_mul(self, other)
        s = float(other)
        return Quaternion(s * self.a, s * self.b, s * self.c, s * self.d)

    def __rmul__(self, other):
        s = float(other)
        return Quaternion(s * self.a, s * self.b, s * self.c, s * self.d)

    def conj(self):
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm(self):
        return math.sqrt(self.a * self.a + self.b * self.b
                         + self.c * self.c + self.d * self.d)

    def imag(self):
        """The (i, j, k) coefficients as a 3-vector."""
        return np.array([self.b, self.c, self.d])

    def isclose(self, other, tol):
        return max(abs(x - y) for x, y in zip(self, other)) < tol

    # Subspace predicates: C_i = {a + bi}, C_j = {a + cj}, I = span(i, j, k).
    def in_c_i(self, tol=1e-12):
        return abs(self.c) < tol and abs(self.d) < tol

    def in_c_j(self, tol=1e-12):
        return abs(self.b) < tol and abs(self.d) < tol

    def is_imaginary(self, tol=1e-12):
        return abs(self.a) < tol


@dataclass(frozen=True)
class UnitQuaternion(Quaternion):
    """Element of S^3.

    Inputs within 1e-9 of unit norm are renormalised; anything further off
    raises :class:`DomainError`.
    """

    def __post_init__(self):
        n = self.norm()
        if not abs(n - 1.0) < UNIT_REPAIR_TOL:
            raise DomainError(f"norm {n!r} is not within {UNIT_REPAIR_TOL} of 1")
        if n != 1.0:
            for f in ("a", "b", "c", "d"):
                object.__setattr__(self, f, getattr(self, f) / n)

    @classmethod
    def of(cls, q):
        return cls(q.a, q.b, q.c, q.d)

    def __neg__(self):
        return UnitQuaternion(-self.a, -self.b, -self.c, -self.d)

    def in_s1_i(self, tol=1e-12):
        return self.in_c_i(tol)


@dataclass(frozen=True)
class ImaginaryUnit(UnitQuaternion):
    """Unit element of I = span(i, j, k); the model of S^2."""

    def __post_init__(self):
        if not abs(self.a) < UNIT_REPAIR_TOL:
            raise DomainError(f"real part {self.a!r} is not zero")
        object.__setattr__(self, "a", 0.0)
        super().__post_init__()
        object.__setattr__(self, "a", 0.0)

    @classmethod
    def from_vector(cls, x):
        b, c, d = (float(t) for t in x)
        return cls(0.0, b, c, d)

    def __neg__(self):
        return ImaginaryUnit(0.0, -self.b, -self.c, -self.d)


ONE = UnitQuaternion(1.0)
I = ImaginaryUnit(0.0, 1.0)
J = ImaginaryUnit(0.0, 0.0, 1.0)
K = ImaginaryUnit(0.0, 0.0, 0.0, 1.0)
SQRT_J = UnitQuaternion(1.0 / math.sqrt(2.0), 0.0, 1.0 / math.sqrt(2.0), 0.0)


def quat_mul(p, q):
    """Hamilton product ``pq``."""
    a1, b1, c1, d1 = p.a, p.b, p.c, p.d
    a2, b2, c2, d2 = q.a, q.b, q.c, q.d
    return Quaternion(
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    )


def quat_inv(q):
    n2 = q.a * q.a + q.b * q.b + q.c * q.c + q.d * q.d
    if n2 == 0.0:
        raise DomainError("zero quaternion has no inverse")
    inv = Quaternion(q.a / n2, -q.b / n2, -q.c / n2, -q.d / n2)
    if isinstance(q, UnitQuaternion):
        return UnitQuaternion.of(inv)
    return inv


def rotate_by(w, x):
    """Right conjugation action ``w^-1 x w`` of S^3 on the unit sphere of I."""
    r = quat_mul(quat_mul(quat_inv(w), x), w)
    return ImaginaryUnit(0.0, r.b, r.c, r.d)


def hopf(w):
    """Hopf map ``w -> w^-1 i w``; constant on left S^1_i-cosets."""
    return rotate_by(w, I)


def antipodal_cover_check(w, tol=1e-12):
    """True iff left multiplication by j negates both w^-1 i w and w^-1 k w."""
    jw = UnitQuaternion.of(quat_mul(J, w))
    ok_i = rotate_by(jw, I).isclose(-rotate_by(w, I), tol)
    ok_k = rotate_by(jw, K).isclose(-rotate_by(w, K), tol)
    return ok_i and ok_k


def circle_i(t):
    """The element cos t + i sin t of S^1_i."""
    return UnitQuaternion(math.cos(t), math.sin(t))
