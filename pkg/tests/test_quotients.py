import math

import numpy as np
import pytest

from s2xs2.actions import F1, F5, T2, f1
from s2xs2.errors import (
    DomainError,
    InconsistentCoverError,
    NotFreeError,
    NotOrderNError,
)
from s2xs2.quat import ONE, SQRT_J, I, J, K, UnitQuaternion, quat_mul
from s2xs2.quotients import (
    GENERATORS,
    LENS,
    QuotientPoint,
    antipodal_descent_check,
    as_flat,
    canonical_rep,
    cover_check,
    deck,
    descent_check,
    diag_stratum_check,
    obstruction_check,
    orbit_of,
    orbit_stack,
    phi,
    quotient_eq,
    quotient_point,
    rp2_attach,
    rp2_fibre,
    tangent_pair,
    theorem_check,
    ut_lift,
)
from s2xs2.sampling import sample_pairs, sample_perp, sample_s3, sample_sphere
from s2xs2.so3 import PerpPair, geodesic
from s2xs2.sphere_pairs import PairPoint, barycentre

E1, E2, E3 = np.eye(3)
P0 = PairPoint(E1, E2)


def test_deck_powers(rng):
    z = sample_s3(rng, 1000)
    l41, l81, l85 = LENS["L41"], LENS["L81"], LENS["L85"]
    assert np.allclose(l41(l41(z)), -z, atol=1e-15)
    assert np.allclose(l85(l85(z)), quat_mul_batch(J, z), atol=1e-15)
    x = z
    for _ in range(4):
        x = l81(x)
    assert np.allclose(x, -z, atol=1e-15)


def quat_mul_batch(q, z):
    return np.stack([quat_mul(q, UnitQuaternion.from_array(r)).as_array() for r in z])


def test_deck_on_scalars():
    assert deck("L81", ONE).isclose(SQRT_J, 1e-15)
    assert deck("L21", SQRT_J).isclose(-SQRT_J, 1e-15)


@pytest.mark.parametrize("tag, order", [("L21", 2), ("L41", 4), ("L81", 8), ("L85", 8)])
def test_deck_orders_and_freeness(tag, order, rng):
    z = sample_s3(rng, 10_000)
    x = z
    for k in range(1, order + 1):
        x = LENS[tag](x)
        d = np.linalg.norm(x - z, axis=1)
        if k < order:
            assert d.min() > 0.5
    assert d.max() < 1e-11


def test_orbit_examples():
    o = orbit_of(GENERATORS["f1"][0], P0, 4)
    want = [(E1, E2), (-E2, E1), (-E1, -E2), (E2, -E1)]
    assert np.allclose(o.points, [np.concatenate(w) for w in want], atol=1e-300)
    o5 = orbit_of(GENERATORS["f5"][0], P0, 4)
    want5 = [(E1, E2), (E2, E1), (-E1, -E2), (-E2, -E1)]
    assert np.allclose(o5.points, [np.concatenate(w) for w in want5], atol=1e-300)
    z = SQRT_J.as_array()
    assert np.allclose(orbit_of(LENS["L21"], z, 2).points, [z, -z])


def test_orbit_errors():
    with pytest.raises(NotOrderNError):
        orbit_stack(GENERATORS["f1"][0], as_flat(P0), 3)
    with pytest.raises(NotFreeError):
        orbit_stack(lambda x: x, np.zeros(4), 1 + 1)


def test_quotient_eq_examples(rng):
    g, n = GENERATORS["f1"]
    assert quotient_eq(as_flat(P0), as_flat(f1(P0)), g, n)
    assert not quotient_eq(as_flat(P0), as_flat(PairPoint(E1, -E2)), g, n)
    z = sample_s3(rng)
    gl, nl = GENERATORS["l41"]
    assert quotient_eq(z, -z, gl, nl)


def test_quotient_point_equality(rng):
    g, n = GENERATORS["f5"]
    p = sample_pairs(rng)
    a = quotient_point(g, p, n, "f5")
    b = quotient_point(g, F5(F5(F5(p))), n, "f5")
    c = quotient_point(g, sample_pairs(rng), n, "f5")
    assert a == b and a != c
    assert np.allclose(a.rep, b.rep, atol=1e-12)
    assert any(np.allclose(a.rep, row) for row in a.orbit)


def test_canonical_rep_stable_under_noise(rng):
    g, n = GENERATORS["f1"]
    x = as_flat(sample_pairs(rng, 2000))
    stack = orbit_stack(g, x, n)
    noisy = stack + rng.normal(scale=1e-12, size=stack.shape)
    a, b = canonical_rep(stack), canonical_rep(np.roll(noisy, 1, axis=0))
    assert np.max(np.abs(a - b)) < 1e-10


def test_ut_lift_examples():
    w, mw = ut_lift(I, K)
    assert w.isclose(ONE, 1e-12) and mw.isclose(-ONE, 1e-12)
    w, _ = ut_lift(-I, -K)
    assert w.isclose(J, 1e-12) or w.isclose(-J, 1e-12)
    with pytest.raises(DomainError):
        ut_lift(I, (I.imag() + K.imag()) / math.sqrt(2))


def test_ut_lift_round_trip(rng):
    for w in sample_s3(rng, 300):
        a, b = tangent_pair(w)
        l0, l1 = ut_lift(a, b)
        assert min(np.abs(l0.as_array() - w).max(), np.abs(l0.as_array() + w).max()) < 1e-9
        assert np.allclose(l0.as_array(), -l1.as_array())


def test_antipodal_descent(rng):
    a0, b0 = tangent_pair(ONE.as_array())
    a1, b1 = tangent_pair(J.as_array())
    assert np.allclose(a1, -a0) and np.allclose(b1, -b0)
    rep = antipodal_descent_check(sample_s3(rng, 10_000), 1e-12)
    assert rep.passed


@pytest.mark.parametrize("cover, base", [
    ("f1sq", "f1"), ("f5sq", "f5"), ("l41", "l81"), ("l41", "l85"), ("l21", "l41"),
])
def test_cover_degree_two(cover, base, rng):
    x = as_flat(sample_perp(rng, 1000)) if cover.startswith("f") else sample_s3(rng, 1000)
    rep = cover_check(f"{cover}->{base}", GENERATORS[cover], GENERATORS[base], x)
    assert rep.passed and dict(rep.cardinalities) == {2: 1000}


def test_cover_refinement_violation(rng):
    z = sample_s3(rng, 10)
    with pytest.raises(InconsistentCoverError):
        # left multiplication by i has order 4 but its orbits are not inside L81 orbits
        cover_check("bad", (lambda x: quat_mul_batch(I, x), 4), GENERATORS["l81"], z)


def test_cover_order_must_divide():
    with pytest.raises(DomainError):
        cover_check("x", (GENERATORS["f1"][0], 3), GENERATORS["f1"], as_flat(P0))


def test_rp2_attach_examples():
    a = rp2_attach(PerpPair(E1, E2))
    b = rp2_attach(PerpPair(-E1, -E2))
    assert a == b
    assert any(np.allclose(r, (E1 + E2) / math.sqrt(2)) for r in a.orbit)
    c = rp2_attach(PerpPair(E2, E3))
    assert any(np.allclose(r, (E2 + E3) / math.sqrt(2)) for r in c.orbit)


def test_rp2_fibre_round_trip(rng):
    m = sample_sphere(rng, 1000)
    d = sample_sphere(rng, 1000)
    d -= np.sum(d * m, axis=1, keepdims=True) * m
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    p = rp2_fibre(m, d)
    assert np.allclose(barycentre(p), m, atol=1e-15)
    assert np.allclose(np.sum(p.u * p.v, axis=1), 0, atol=1e-15)


@pytest.mark.parametrize("ell", [1, 5])
def test_diag_stratum(ell, rng):
    f = F1 if ell == 1 else F5
    q = f(PairPoint(E1, E1.copy()))
    if ell == 1:
        assert np.allclose(q.u, -E1) and np.allclose(q.v, E1)
    else:
        assert np.allclose(q.u, -T2 @ E1) and np.allclose(q.v, T2 @ E1)
    assert diag_stratum_check(ell, sample_sphere(rng, 10_000), 1e-12).passed


def test_descent_examples():
    base = phi(ONE.as_array())
    assert np.allclose(base.u, E2) and np.allclose(base.v, E3)
    moved = phi(SQRT_J.as_array())
    assert np.allclose(moved.u, E3) and np.allclose(moved.v, -E2)      # = f1^-1(e2, e3)
    l85 = phi(LENS["L85"](ONE.as_array()))
    f5_img = F5(PairPoint(E2, E3))
    assert np.allclose(l85.u, f5_img.u) and np.allclose(l85.v, f5_img.v)


@pytest.mark.parametrize("ell, sign", [(1, "f1^-1"), (5, "f5")])
def test_descent_sweep(ell, sign, rng):
    rep = descent_check(ell, sample_s3(rng, 10_000), 1e-11, strict=True)
    assert rep.passed and rep.note == f"sign={sign}"


def test_theorem_endpoint_example():
    g = GENERATORS["f1"][0]
    orbit = orbit_stack(g, as_flat(P0), 4)
    from s2xs2.actions import intertwine
    mapped = np.stack([as_flat(intertwine(T2, PairPoint.from_flat(r))) for r in orbit])
    target = orbit_stack(GENERATORS["f5"][0], as_flat(PairPoint(E1, -E2)), 4)
    d = np.linalg.norm(mapped[:, None] - target[None], axis=-1)
    assert np.all(d.min(axis=1) < 1e-15) and np.all(d.min(axis=0) < 1e-15)
    assert np.allclose(geodesic(np.eye(3), T2, 0.0), np.eye(3))


def test_theorem_check(rng):
    rep = theorem_check(11, sample_pairs(rng, 2000), rng, 1e-12, strict=True)
    assert rep.passed and rep.samples == 22_000
    with pytest.raises(DomainError):
        theorem_check(1, sample_pairs(rng, 10), rng)


def test_obstruction_check(rng):
    rep = obstruction_check(11, sample_perp(rng, 1000), 1e-12)
    assert rep.passed
    assert "max 2.82842712474619" in rep.note
    assert "witness" in rep.note and "no witness" not in rep.note
    with pytest.raises(DomainError):
        obstruction_check(2, sample_perp(rng, 10))


def test_witness_example_stays_perp():
    # at A = T the pair (e2, e3) is mapped to another orthogonal pair
    from s2xs2.actions import fA
    from s2xs2.so3 import t_matrix
    q = fA(t_matrix(), PairPoint(E2, E3))
    assert np.allclose(q.u, E2) and np.allclose(q.v, -E3)
    assert abs(q.u @ q.v) < 1e-15


def test_quotient_point_rejects_other_types():
    q = QuotientPoint(np.zeros(3), "RP2", np.zeros((2, 3)))
    assert (q == "x") is False
