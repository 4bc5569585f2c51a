"""Points of S^2 x S^2, their strata, and the angle charts on A and O.

Pairs are :class:`PairPoint` tuples of numpy arrays; every function here
accepts either single pairs (``u.shape == (3,)``) or stacks ``(N, 3)``.

The five strata are the diagonal, the antidiagonal, the orthogonal pairs
``⊥``, and the open sets of pairs at acute / obtuse angle.  On the open
strata the angle is rescaled to ``t in (0, 1)`` (orientation reversed on
the obtuse side) and the pair is spread apart about its barycentre into an
orthogonal pair, giving ``A ≅ (0,1) x ⊥ ≅ O``.
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .so3 import PerpPair

DEFAULT_TOL = 1e-9
_SQRT2 = math.sqrt(2.0)


class StratumLabel(enum.IntEnum):
    DIAGONAL = 0
    ANTIDIAGONAL = 1
    PERP = 2
    ACUTE = 3
    OBTUSE = 4


class PairPoint(NamedTuple):
    u: np.ndarray
    v: np.ndarray

    @classmethod
    def of(cls, u, v):
        return cls(np.asarray(u, dtype=float), np.asarray(v, dtype=float))

    def flat(self):
        return np.concatenate([self.u, self.v], axis=-1)

    @classmethod
    def from_flat(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x[..., :3], x[..., 3:])


class ChartPoint(NamedTuple):
    t: float | np.ndarray
    orthopair: PerpPair


def sphere_point(x):
    """Validate a unit 3-vector."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.abs(np.linalg.norm(x, axis=-1) - 1.0) < 1e-12):
        raise DomainError("not a unit vector")
    return x


def _norm(x):
    return np.linalg.norm(x, axis=-1)


def _dot(x, y):
    return np.sum(x * y, axis=-1)


def classify_batch(p, tol=DEFAULT_TOL):
    """Integer stratum codes (values of :class:`StratumLabel`) for a stack."""
    u, v = p
    dot = _dot(u, v)
    return np.select(
        [_norm(u - v) < tol, _norm(u + v) < tol, np.abs(dot) < tol, dot > 0],
        [StratumLabel.DIAGONAL, StratumLabel.ANTIDIAGONAL, StratumLabel.PERP,
         StratumLabel.ACUTE],
        default=StratumLabel.OBTUSE,
    )


def classify(p, tol=DEFAULT_TOL):
    codes = classify_batch(p, tol)
    if np.ndim(codes) == 0:
        return StratumLabel(int(codes))
    return codes


def pair_angle(u, v):
    """Angle between unit vectors via atan2(|u - v|, |u + v|); stable near 0 and pi."""
    return 2.0 * np.arctan2(_norm(u - v), _norm(u + v))


def _spread(u, v):
    m = u + v
    m = m / _norm(m)[..., None]
    d = v - u
    d = d / _norm(d)[..., None]
    return PerpPair((m - d) / _SQRT2, (m + d) / _SQRT2)


def _require(p, label, what):
    codes = classify_batch(p)
    if not np.all(codes == label):
        raise DomainError(f"{what} needs {label.name.lower()} pairs")


def acute_chart(p):
    _require(p, StratumLabel.ACUTE, "acute_chart")
    theta = pair_angle(*p)
    return ChartPoint(2.0 * theta / math.pi, _spread(*p))


def obtuse_chart(p):
    _require(p, StratumLabel.OBTUSE, "obtuse_chart")
    theta = pair_angle(*p)
    return ChartPoint(2.0 * (math.pi - theta) / math.pi, _spread(*p))


def chart_inverse(c, which):
    """Pair at rescaled angle ``c.t`` whose spread orthogonal pair is ``c.orthopair``."""
    t = np.asarray(c.t, dtype=float)
    if not np.all((t > 0.0) & (t < 1.0)):
        raise DomainError("chart parameter must lie strictly inside (0, 1)")
    if which == StratumLabel.ACUTE:
        theta = t * math.pi / 2.0
    elif which == StratumLabel.OBTUSE:
        theta = math.pi - t * math.pi / 2.0
    else:
        raise DomainError(f"charts exist only on acute/obtuse strata, not {which!r}")
    u1, v1 = c.orthopair
    m = (u1 + v1) / _SQRT2
    d = (v1 - u1) / _SQRT2
    ch = np.cos(theta / 2.0)[..., None]
    sh = np.sin(theta / 2.0)[..., None]
    return PairPoint(ch * m - sh * d, ch * m + sh * d)


def folding_map(p):
    """Fold A and O onto one copy of (0, 1) x ⊥."""
    codes = classify_batch(p)
    acute = codes == StratumLabel.ACUTE
    if not np.all(acute | (codes == StratumLabel.OBTUSE)):
        raise DomainError("folding_map is defined on the open strata only")
    theta = pair_angle(*p)
    t = np.where(acute, 2.0 * theta / math.pi, 2.0 * (math.pi - theta) / math.pi)
    return ChartPoint(t[()], _spread(*p))


def barycentre(p):
    u, v = p
    s = u + v
    n = _norm(s)
    if np.any(n < 1e-9):
        raise DomainError("barycentre of an antipodal pair is undefined")
    return s / n[..., None]
