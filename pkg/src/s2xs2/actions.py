"""The order-4 maps f1, f5 and the family f_A on S^2 x S^2.

    f1(u, v)  = (-v, u)
    f5(u, v)  = (-T^2 v, T^2 u)
    fA(u, v)  = (-A v, A^-1 u)

``fA`` squares to ``(u, v) -> (-u, -v)`` for every rotation ``A`` and moves
every point by exactly 2 in R^6, so all of these actions are free.  The
map ``g_A(u, v) = (u, A^-1 v)`` intertwines f1 with fA and therefore
identifies the quotients fibrewise along any path in SO(3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, NotPeriodicError
from .so3 import as_rotation, t_matrix
from .sphere_pairs import PairPoint

T2 = t_matrix() @ t_matrix()


def _apply(M, x):
    return np.einsum("...ij,...j->...i", M, x)


def f1(p):
    u, v = p
    return PairPoint(-v, u)


def f1_inv(p):
    u, v = p
    return PairPoint(v, -u)


def f5(p):
    u, v = p
    return PairPoint(-_apply(T2, v), _apply(T2, u))


def f5_inv(p):
    u, v = p
    return PairPoint(_apply(T2, v), -_apply(T2, u))


def fA(A, p):
    A = as_rotation(A)
    u, v = p
    return PairPoint(*kernels.fa_apply(A, u, v))


def double_antipodal(p):
    u, v = p
    return PairPoint(-u, -v)


def pair_distance(p, q):
    """Ambient R^6 distance between pairs (broadcasts over stacks)."""
    du = p[0] - q[0]
    dv = p[1] - q[1]
    return np.sqrt(np.sum(du * du, axis=-1) + np.sum(dv * dv, axis=-1))


def displacement(A, p):
    return pair_distance(p, fA(A, p))


@dataclass(frozen=True)
class ActionGenerator:
    """One of the generators F1, F5 or FA(A)."""

    tag: str
    A: np.ndarray | None = None

    def __post_init__(self):
        if self.tag not in ("F1", "F5", "FA"):
            raise DomainError(f"unknown generator tag {self.tag!r}")
        if self.tag == "FA":
            if self.A is None:
                raise DomainError("FA needs a rotation parameter")
            object.__setattr__(self, "A", as_rotation(self.A))

    def __call__(self, p):
        if self.tag == "F1":
            return f1(p)
        if self.tag == "F5":
            return f5(p)
        return fA(self.A, p)

    def power(self, k, p):
        for _ in range(k):
            p = self(p)
        return p

    def flat(self, x):
        """The generator acting on flattened pairs of shape (..., 6)."""
        return self(PairPoint.from_flat(x)).flat()


F1 = ActionGenerator("F1")
F5 = ActionGenerator("F5")


def order_of(g, samples, tol=1e-12):
    """Smallest k in 1..4 with g^k = id on the sample pairs, to within ``tol``."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    if np.size(samples[0]) == 0:
        raise DomainError("need at least one sample")
    q = samples
    for k in range(1, 5):
        q = g(q)
        if float(np.max(pair_distance(q, samples))) < tol:
            return k
    raise NotPeriodicError("no period k <= 4 on the samples")


def intertwine(A, p):
    """g_A(u, v) = (u, A^-1 v); satisfies g_A f1 = fA g_A."""
    A = as_rotation(A)
    u, v = p
    return PairPoint(u, _apply(np.swapaxes(A, -1, -2), v))


def intertwine_inverse(A, p):
    A = as_rotation(A)
    u, v = p
    return PairPoint(u, _apply(A, v))
