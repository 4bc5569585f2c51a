"""Finite cyclic quotients: lens spaces, S^2 x S^2 / f, and their strata.

Points of a quotient are modelled by finite orbits.  Everything here works
on *flat* arrays: unit quaternions as ``(..., 4)`` and pairs ``(u, v)`` as
``(..., 6)``; a generator is any callable mapping such arrays to arrays of
the same shape.  Orbit stacks have shape ``(n, N, D)``.

The sweep checks at the bottom (covers, descent, theorem, obstruction)
take pre-drawn samples and return :class:`~s2xs2.report.CheckReport`
records; they raise only on precondition violations, or when called with
``strict=True``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import kernels
from .actions import (
    F1,
    F5,
    ActionGenerator,
    double_antipodal,
    f1_inv,
    f5_inv,
    fA,
    intertwine,
    intertwine_inverse,
    order_of,
    pair_distance,
)
from .errors import (
    DescentError,
    DomainError,
    InconsistentCoverError,
    NotFreeError,
    NotOrderNError,
    NotPeriodicError,
    TheoremCheckError,
)
from .quat import SQRT_J, J, Quaternion, UnitQuaternion, quat_inv, quat_mul
from .report import CheckReport, stopwatch
from .so3 import (
    PerpPair,
    geodesic,
    involution_defect,
    lift_rotation,
    rotation_to_perp,
    t_matrix,
)
from .sphere_pairs import PairPoint, StratumLabel, barycentre, classify_batch

ORBIT_TOL = 1e-10
CANON_GRID = 1e-7
WITNESS_THRESHOLD = 0.1


# -- lens spaces -------------------------------------------------------------

_J = J.as_array()
_SQRT_J = SQRT_J.as_array()
_SQRT_J_J = quat_mul(SQRT_J, J).as_array()
_J_INV = quat_inv(J).as_array()


def _deck_l21(z):
    return -np.asarray(z, dtype=float)


def _deck_l41(z):
    return kernels.qmul(_J, z)


def _deck_l81(z):
    return kernels.qmul(_SQRT_J, z)


def _deck_l85(z):
    # sqrt(j) j z j^-1
    return kernels.qmul(_SQRT_J_J, kernels.qmul(z, _J_INV))


@dataclass(frozen=True)
class LensModel:
    tag: str
    order: int
    generator: object

    def __call__(self, z):
        return self.generator(z)


LENS = {
    "L21": LensModel("L21", 2, _deck_l21),
    "L41": LensModel("L41", 4, _deck_l41),
    "L81": LensModel("L81", 8, _deck_l81),
    "L85": LensModel("L85", 8, _deck_l85),
}


def deck(model, z):
    """Apply the deck generator; unit quaternions in, unit quaternions out."""
    if isinstance(model, str):
        model = LENS[model]
    if isinstance(z, Quaternion):
        return UnitQuaternion.from_array(model(z.as_array()))
    return model(z)


# -- orbits -----------------------------------------------------------------

def as_flat(p):
    if isinstance(p, Quaternion):
        return p.as_array()
    if isinstance(p, (PairPoint, PerpPair)):
        return np.concatenate([p[0], p[1]], axis=-1)
    return np.asarray(p, dtype=float)


def power(generator, k, x):
    for _ in range(k):
        x = generator(x)
    return x


def _dist(x, y):
    return np.linalg.norm(x - y, axis=-1)


def orbit_stack(generator, x, n, tol=ORBIT_TOL):
    """``(x, g x, ..., g^(n-1) x)`` stacked on a new leading axis.

    Raises :class:`NotOrderNError` if ``g^n x != x`` and :class:`NotFreeError`
    if two entries coincide.
    """
    x = as_flat(x)
    entries = [x]
    for _ in range(n - 1):
        entries.append(generator(entries[-1]))
    stack = np.stack(entries)
    closure = _dist(generator(stack[-1]), x)
    if not np.all(closure < tol):
        raise NotOrderNError(f"orbit does not close after {n} steps "
                             f"(gap {float(np.max(closure)):.3g})")
    for a in range(n):
        for b in range(a + 1, n):
            if np.any(_dist(stack[a], stack[b]) < tol):
                raise NotFreeError(f"orbit entries {a} and {b} coincide")
    return stack


def canonical_rep(stack, grid=CANON_GRID):
    """Lexicographically least orbit entry after bucketing to ``grid``.

    ``stack`` has shape (n, ..., D); the result has shape (..., D).
    """
    stack = np.asarray(stack, dtype=float)
    n, D = stack.shape[0], stack.shape[-1]
    flat = stack.reshape(n, -1, D)
    keys = np.round(flat / grid)
    alive = np.ones(flat.shape[:2], dtype=bool)
    for col in range(D):
        vals = np.where(alive, keys[:, :, col], np.inf)
        alive &= vals == vals.min(axis=0)
    pick = np.argmax(alive, axis=0)
    rep = flat[pick, np.arange(flat.shape[1])]
    return rep.reshape(stack.shape[1:])


@dataclass(frozen=True)
class Orbit:
    points: np.ndarray
    tag: str = ""

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class QuotientPoint:
    """A point of a cyclic quotient, kept with its whole orbit.

    Equality is setwise comparison of orbits within ``tol``.
    """

    rep: np.ndarray
    tag: str
    orbit: np.ndarray
    tol: float = ORBIT_TOL

    def __eq__(self, other):
        if not isinstance(other, QuotientPoint) or self.tag != other.tag:
            return NotImplemented
        if self.orbit.shape != other.orbit.shape:
            return False
        d = np.linalg.norm(self.orbit[:, None, :] - other.orbit[None, :, :], axis=-1)
        return bool(np.all(d.min(axis=1) < self.tol) and np.all(d.min(axis=0) < self.tol))

    __hash__ = None


def orbit_of(generator, p, n, tol=ORBIT_TOL, tag=""):
    return Orbit(orbit_stack(generator, p, n, tol), tag)


def quotient_point(generator, p, n, tag="", tol=ORBIT_TOL):
    stack = orbit_stack(generator, p, n, tol)
    return QuotientPoint(canonical_rep(stack), tag, stack, tol)


def quotient_eq(p, q, generator, n, tol=ORBIT_TOL):
    """True where ``q`` lies in the orbit of ``p`` (broadcasts over stacks)."""
    stack = orbit_stack(generator, p, n)
    d = _dist(stack, as_flat(q)[None])
    res = d.min(axis=0) < tol
    return bool(res) if res.ndim == 0 else res


# named generators on flat arrays, with their orders
def _pair_gen(f):
    def g(x):
        u, v = f(PairPoint.from_flat(x))
        return np.concatenate([u, v], axis=-1)
    return g


GENERATORS = {
    "f1": (_pair_gen(F1), 4),
    "f5": (_pair_gen(F5), 4),
    "f1sq": (_pair_gen(lambda p: F1(F1(p))), 2),
    "f5sq": (_pair_gen(lambda p: F5(F5(p))), 2),
    "l21": (LENS["L21"], 2),
    "l41": (LENS["L41"], 4),
    "l81": (LENS["L81"], 8),
    "l85": (LENS["L85"], 8),
}


def fa_generator(A):
    return _pair_gen(ActionGenerator("FA", A))


# -- unit tangent bundle and RP^2 -------------------------------------------

def _jik(x):
    """(i, j, k) coordinates -> (j, i, k) coordinates."""
    x = np.asarray(x, dtype=float)
    return x[..., [1, 0, 2]]


def ut_lift(a, b):
    """The two unit quaternions w with w^-1 i w = a and w^-1 k w = b."""
    a = a.imag() if isinstance(a, Quaternion) else np.asarray(a, dtype=float)
    b = b.imag() if isinstance(b, Quaternion) else np.asarray(b, dtype=float)
    if not abs(float(a @ b)) < 1e-9:
        raise DomainError("ut_lift needs orthogonal imaginary units")
    R = np.stack([_jik(np.cross(b, a)), _jik(a), _jik(b)], axis=-1)
    return lift_rotation(R)


def tangent_pair(w):
    """(w^-1 i w, w^-1 k w) as (i, j, k) coordinate arrays; batched."""
    w = np.asarray(w, dtype=float)
    i = np.broadcast_to([1.0, 0.0, 0.0], w.shape[:-1] + (3,))
    k = np.broadcast_to([0.0, 0.0, 1.0], w.shape[:-1] + (3,))
    return kernels.qrotate(w, i), kernels.qrotate(w, k)


def rp2_attach(p):
    """Class of ±barycentre(p) in RP^2, as a quotient point of the antipodal map."""
    m = barycentre(p)
    return quotient_point(np.negative, m, 2, tag="RP2")


def rp2_fibre(m, d):
    """Orthogonal pair over ±m parameterised by a unit vector d ⊥ m."""
    m = np.asarray(m, dtype=float)
    d = np.asarray(d, dtype=float)
    r = math.sqrt(2.0)
    return PerpPair((m - d) / r, (m + d) / r)


# -- sweep checks -----------------------------------------------------------

def antipodal_descent_check(w, tol=1e-12):
    """Left multiplication by j negates the tangent pair (w^-1 i w, w^-1 k w)."""
    with stopwatch() as sw:
        a0, b0 = tangent_pair(w)
        a1, b1 = tangent_pair(kernels.qmul(_J, w))
        err = max(float(np.max(np.abs(a1 + a0))), float(np.max(np.abs(b1 + b0))))
    return CheckReport("antipodal_descent", "left mult by j on S^3/-1 and S^3/S^1_i = antipodal map",
                       len(w), err, tol, sw[0])


@dataclass
class CoverReport:
    name: str
    samples: int
    cardinalities: Counter
    expected: int

    @property
    def passed(self):
        return set(self.cardinalities) == {self.expected}


def cover_fibres(cover, m, base, n, x, tol=ORBIT_TOL):
    """Number of cover-orbits inside each base-orbit, one count per sample."""
    G = orbit_stack(base, x, n, tol)
    same = np.zeros((n, n) + G.shape[1:-1], dtype=bool)
    for k in range(n):
        H = orbit_stack(cover, G[k], m, tol)
        d = np.linalg.norm(H[:, None] - G[None, :], axis=-1)   # (m, n, N)
        if not np.all(d.min(axis=1) < tol):
            raise InconsistentCoverError("a cover orbit leaves its base orbit")
        same[k] = d.min(axis=0) < tol
    new_class = np.ones((n,) + G.shape[1:-1], dtype=bool)
    for k in range(1, n):
        new_class[k] = ~np.any(same[k, :k], axis=0)
    return new_class.sum(axis=0)


def cover_check(name, cover, base, x, tol=ORBIT_TOL):
    """``cover`` and ``base`` are (generator, order); expected degree is n / m."""
    (h, m), (g, n) = cover, base
    if n % m:
        raise DomainError("cover order must divide base order")
    counts = cover_fibres(h, m, g, n, x, tol)
    return CoverReport(name, int(np.size(counts)), Counter(np.ravel(counts).tolist()), n // m)


def cover_report(name, cover, base, x, tol=ORBIT_TOL):
    with stopwatch() as sw:
        cr = cover_check(name, cover, base, x, tol)
    bad = sum(c for k, c in cr.cardinalities.items() if k != cr.expected)
    note = "fibre cardinalities " + ",".join(f"{k}:{v}" for k, v in sorted(cr.cardinalities.items()))
    return CheckReport(f"cover_{name}", "double covering of quotients", cr.samples,
                       float(bad), 0.5, sw[0], note)


def diag_stratum_check(ell, u, tol=1e-12):
    """f maps Δ -> Δ̄ -> Δ, f^2 is the antipodal map on Δ, and orbits meet Δ twice."""
    f = F1 if ell == 1 else F5
    with stopwatch() as sw:
        p = PairPoint(u, u.copy())
        orbit = [p]
        for _ in range(3):
            orbit.append(f(orbit[-1]))
        labels = np.stack([classify_batch(q) for q in orbit])
        want = np.array([StratumLabel.DIAGONAL, StratumLabel.ANTIDIAGONAL,
                         StratumLabel.DIAGONAL, StratumLabel.ANTIDIAGONAL])
        mismatches = int(np.sum(labels != want[:, None]))
        err = float(np.max(pair_distance(orbit[2], double_antipodal(p))))
        if mismatches:
            err = math.inf
    return CheckReport(f"diag_stratum_f{ell}", "(Δ ⊔ Δ̄)/f ≅ RP^2 via f^2|Δ = antipodal",
                       len(u), err, tol, sw[0], f"label mismatches {mismatches}")


def phi(z):
    """S^3 -> ⊥, z -> rotation_to_perp(spin_cover(z)); constant on ±z."""
    return PairPoint(*rotation_to_perp(kernels.spin_cover(z)))


def descent_check(ell, z, tol=1e-11, strict=False):
    """phi conjugates the L_{8,ell} deck to f_ell or its inverse."""
    model = LENS["L81"] if ell == 1 else LENS["L85"]
    f, f_inv = (F1, f1_inv) if ell == 1 else (F5, f5_inv)
    with stopwatch() as sw:
        base = phi(z)
        lhs = phi(model(z))
        e_fwd = float(np.max(pair_distance(lhs, f(base))))
        e_inv = float(np.max(pair_distance(lhs, f_inv(base))))
        if e_fwd <= e_inv:
            err, sign, g = e_fwd, f"f{ell}", f
        else:
            err, sign, g = e_inv, f"f{ell}^-1", f_inv
        # orbit level: the 8 deck iterates hit each of the 4 f-orbit entries twice
        zs = [z]
        for _ in range(7):
            zs.append(model(zs[-1]))
        images = np.stack([as_flat(phi(w)) for w in zs])
        targets = [base]
        for _ in range(3):
            targets.append(g(targets[-1]))
        tflat = np.stack([as_flat(t) for t in targets])
        d = np.linalg.norm(images[:, None] - tflat[None, :], axis=-1)   # (8, 4, N)
        hits = (d < tol).sum(axis=0)
        orbit_err = float(np.max(d.min(axis=1)))
        if not np.all(hits == 2):
            orbit_err = math.inf
        err = max(err, orbit_err)
    if strict and not err < tol:
        raise DescentError(f"descent failed for ell={ell} (error {err:.3g})")
    return CheckReport(f"descent_L8{ell}", f"L_(8,{ell}) ≅ ⊥/f_{ell}", len(z), err, tol, sw[0],
                       f"sign={sign if err < tol else 'none'}")


def theorem_check(path_steps, pairs, rng, tol=1e-12, strict=False):
    """Fibrewise identification of S^2 x S^2 / f_A along the geodesic Id -> T^2.

    At every step: f_A has order 4, constant displacement 2 and square law;
    g_A carries f1-orbits onto f_A-orbits; the induced map on quotient points
    is injective (tested on pairs from the same and from different orbits) and
    surjective (tested through g_A^-1).
    """
    if path_steps < 2:
        raise DomainError("path_steps must be >= 2")
    T2 = t_matrix() @ t_matrix()
    n = len(pairs.u)
    other = PairPoint(*pairs)
    # half of the comparison partners lie in the same f1-orbit
    shift = rng.integers(0, 4, size=n)
    same_orbit = rng.random(n) < 0.5
    partner_u, partner_v = np.array(pairs.u), np.array(pairs.v)
    for r in range(1, 4):
        q = F1.power(r, pairs)
        sel = same_orbit & (shift == r)
        partner_u[sel], partner_v[sel] = q.u[sel], q.v[sel]
    rand = PairPoint(other.u[::-1], other.v[::-1])
    partner_u[~same_orbit] = rand.u[~same_orbit]
    partner_v[~same_orbit] = rand.v[~same_orbit]
    partner = PairPoint(partner_u, partner_v)
    targets = PairPoint(pairs.v, pairs.u)

    f1_gen = GENERATORS["f1"][0]
    eq1 = quotient_eq(as_flat(pairs), as_flat(partner), f1_gen, 4)

    worst, worst_t, note = 0.0, None, ""
    with stopwatch() as sw:
        for t in np.linspace(0.0, 1.0, path_steps):
            A = geodesic(np.eye(3), T2, float(t))
            gA = ActionGenerator("FA", A)
            errs = []
            try:
                order_ok = order_of(gA, pairs, tol) == 4
            except NotPeriodicError:
                order_ok = False
            errs.append(float(np.max(np.abs(pair_distance(pairs, gA(pairs)) - 2.0))))
            errs.append(float(np.max(pair_distance(gA(gA(pairs)), double_antipodal(pairs)))))
            # g_A(f1^k p) = f_A^k g_A(p)
            lhs, rhs = pairs, intertwine(A, pairs)
            for _ in range(3):
                lhs = F1(lhs)
                rhs = gA(rhs)
                errs.append(float(np.max(pair_distance(intertwine(A, lhs), rhs))))
            eqA = quotient_eq(as_flat(intertwine(A, pairs)), as_flat(intertwine(A, partner)),
                              fa_generator(A), 4)
            injective_ok = bool(np.all(eqA == eq1))
            back = intertwine(A, intertwine_inverse(A, targets))
            errs.append(float(np.max(pair_distance(back, targets))))
            e = max(errs)
            if not (order_ok and injective_ok):
                e = math.inf
            if e > worst or worst_t is None:
                worst, worst_t = e, float(t)
            if not e < tol and not note:
                note = f"first failure at t={float(t):.6g}"
    if not note:
        note = f"worst t={worst_t:.6g}; same-orbit partners {int(same_orbit.sum())}"
    if strict and not worst < tol:
        raise TheoremCheckError(note, worst_t)
    return CheckReport("theorem_fibrewise_identification", "M_1 ≅ M_5 via the f_A family over SO(3)",
                       n * path_steps, worst, tol, sw[0], note)


def obstruction_check(path_steps, perp_samples, tol=1e-12):
    """Order-2 defect along Id -> T^2 and a witness that f_A breaks the strata.

    Error is the largest endpoint defect, plus the shortfall of the path
    maximum below 2, plus infinity when no witness is found.
    """
    if path_steps < 3:
        raise DomainError("path_steps must be >= 3")
    T2 = t_matrix() @ t_matrix()
    with stopwatch() as sw:
        ts = np.linspace(0.0, 1.0, path_steps)
        path = [geodesic(np.eye(3), T2, float(t)) for t in ts]
        defects = np.array([float(involution_defect(R)) for R in path])
        err = max(defects[0], defects[-1]) + max(0.0, 2.0 - defects[1:-1].max())
        witness = None
        for t, A in zip(ts[1:-1], path[1:-1]):
            q = fA(A, perp_samples)
            dots = np.abs(np.sum(q.u * q.v, axis=-1))
            hit = np.flatnonzero(dots > WITNESS_THRESHOLD)
            if hit.size:
                witness = (float(t), int(hit[0]), float(dots[hit[0]]))
                break
        if witness is None:
            err = math.inf
    kmax = int(np.argmax(defects))
    note = (f"defect endpoints {defects[0]:.3g},{defects[-1]:.3g}; "
            f"max {defects[kmax]:.17g} at t={ts[kmax]:.6g}; min interior {defects[1:-1].min():.6g}; ")
    note += (f"witness t={witness[0]:.6g} sample {witness[1]} |u.v|={witness[2]:.6g}"
             if witness else "no witness")
    return CheckReport("obstruction_order2_path", "Id, T^2 not joined through order-2 elements",
                       len(perp_samples.u), err, tol, sw[0], note)
