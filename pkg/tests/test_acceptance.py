"""Acceptance gate: one group of tests per criterion, at the stated tolerances.

Each test is tagged with its criterion; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from s2xs2 import kernels
from s2xs2.actions import (
    F1,
    F5,
    T2,
    ActionGenerator,
    double_antipodal,
    f1,
    f5,
    fA,
    intertwine,
    order_of,
    pair_distance,
)
from s2xs2.harness import RunConfig, render_json, run
from s2xs2.quat import SQRT_J, UnitQuaternion, quat_mul
from s2xs2.quotients import (
    GENERATORS,
    LENS,
    as_flat,
    cover_check,
    descent_check,
    obstruction_check,
    orbit_stack,
    theorem_check,
)
from s2xs2.sampling import make_rng, sample_pairs, sample_perp, sample_s3, sample_sphere
from s2xs2.so3 import (
    geodesic,
    involution_defect,
    spin_cover,
    spin_cover_batch,
    t_matrix,
)
from s2xs2.sphere_pairs import (
    ChartPoint,
    PairPoint,
    StratumLabel,
    acute_chart,
    chart_inverse,
    classify_batch,
    folding_map,
    obtuse_chart,
)

N = 10_000
SEED = 42


def crit(number, title):
    return pytest.mark.criterion(number, title)


def stream(k):
    return make_rng(SEED, 100 + k)


def maxdist(p, q):
    return float(np.max(pair_distance(p, q)))


# 1 ---------------------------------------------------------------------------

@crit(1, "f_l^4 = id, f_l^2 = double antipodal, f1^2 = f5^2 (1e-12, < 1 s)")
def test_c1_order_and_square_law():
    p = sample_pairs(stream(1), N)
    start = time.perf_counter()
    anti = PairPoint(-p.u, -p.v)
    for f in (f1, f5):
        sq = f(f(p))
        assert maxdist(sq, anti) < 1e-12
        assert maxdist(f(f(sq)), p) < 1e-12
    assert maxdist(f1(f1(p)), f5(f5(p))) < 1e-12
    assert time.perf_counter() - start < 1.0


@crit(1, "f_l^4 = id, f_l^2 = double antipodal, f1^2 = f5^2 (1e-12, < 1 s)")
def test_c1_explicit_matrices():
    # f1 and f5 as 6x6 matrices; their squares are -Id exactly
    Z = np.zeros((3, 3))
    M1 = np.block([[Z, -np.eye(3)], [np.eye(3), Z]])
    M5 = np.block([[Z, -T2], [T2, Z]])
    assert np.array_equal(M1 @ M1, -np.eye(6)) and np.array_equal(M5 @ M5, -np.eye(6))
    p = sample_pairs(stream(1), 100)
    assert np.allclose(f5(p).flat(), p.flat() @ M5.T, atol=1e-15)


# 2 ---------------------------------------------------------------------------

@crit(2, "spin_cover(sqrt j) = T (1e-12); rho(pq) = rho(q) rho(p) (1e-11)")
def test_c2_sqrt_j_maps_to_t():
    T = t_matrix()
    assert np.max(np.abs(spin_cover(SQRT_J) - T)) < 1e-12
    assert np.max(np.abs(spin_cover_batch(SQRT_J.as_array()) - T)) < 1e-12


@crit(2, "spin_cover(sqrt j) = T (1e-12); rho(pq) = rho(q) rho(p) (1e-11)")
def test_c2_anti_homomorphism():
    rng = stream(2)
    p, q = sample_s3(rng, N), sample_s3(rng, N)
    lhs = spin_cover_batch(kernels.qmul(p, q))
    rhs = spin_cover_batch(q) @ spin_cover_batch(p)
    assert np.max(np.abs(lhs - rhs)) < 1e-11
    # scalar route on a subset
    for a, b in zip(p[:50], q[:50]):
        pa, qb = UnitQuaternion.from_array(a), UnitQuaternion.from_array(b)
        assert np.max(np.abs(spin_cover(quat_mul(pa, qb)) - spin_cover(qb) @ spin_cover(pa))) < 1e-11


# 3 ---------------------------------------------------------------------------

E_I = np.array([1.0, 0.0, 0.0])
E_K = np.array([0.0, 0.0, 1.0])
J4 = np.array([0.0, 0.0, 1.0, 0.0])


@crit(3, "Hopf fibres are S^1_i cosets; left j negates w^-1 i w and w^-1 k w (1e-12)")
def test_c3_hopf_fibre_invariance():
    rng = stream(3)
    w = sample_s3(rng, N)
    th = rng.uniform(0, 2 * math.pi, N)
    circle = np.stack([np.cos(th), np.sin(th), 0 * th, 0 * th], axis=1)
    moved = kernels.qmul(circle, w)
    assert np.max(np.abs(kernels.qrotate(moved, E_I) - kernels.qrotate(w, E_I))) < 1e-12


@crit(3, "Hopf fibres are S^1_i cosets; left j negates w^-1 i w and w^-1 k w (1e-12)")
def test_c3_antipodal():
    w = sample_s3(stream(3), N)
    jw = kernels.qmul(J4, w)
    for e in (E_I, E_K):
        assert np.max(np.abs(kernels.qrotate(jw, e) + kernels.qrotate(w, e))) < 1e-12


# 4 ---------------------------------------------------------------------------

@crit(4, "lens deck orders (2,4,8,8), L85^2 = j z (1e-12), free with displacement > 0.5")
@pytest.mark.parametrize("tag, order", [("L21", 2), ("L41", 4), ("L81", 8), ("L85", 8)])
def test_c4_deck_orders(tag, order):
    z = sample_s3(stream(4), N)
    x = z
    for k in range(1, order + 1):
        x = LENS[tag](x)
        d = np.linalg.norm(x - z, axis=1)
        if k < order:
            assert d.min() > 0.5
        else:
            assert d.max() < 1e-12
    assert LENS[tag].order == order


@crit(4, "lens deck orders (2,4,8,8), L85^2 = j z (1e-12), free with displacement > 0.5")
def test_c4_l85_square():
    z = sample_s3(stream(4), N)
    # independent oracle: left multiplication by j as a signed coordinate permutation
    jz = np.stack([-z[:, 2], z[:, 3], z[:, 0], -z[:, 1]], axis=1)
    assert np.max(np.abs(LENS["L85"](LENS["L85"](z)) - jz)) < 1e-12


# 5 ---------------------------------------------------------------------------

SWAP = {StratumLabel.DIAGONAL: StratumLabel.ANTIDIAGONAL,
        StratumLabel.ANTIDIAGONAL: StratumLabel.DIAGONAL,
        StratumLabel.PERP: StratumLabel.PERP,
        StratumLabel.ACUTE: StratumLabel.OBTUSE,
        StratumLabel.OBTUSE: StratumLabel.ACUTE}


@crit(5, "strata swap/preserve under f_l, chart round trips and folding equivariance (1e-10, < 2 s)")
def test_c5_strata_and_charts():
    rng = stream(5)
    start = time.perf_counter()
    p = sample_pairs(rng, N)
    u = sample_sphere(rng, N)
    perp = sample_perp(rng, N)
    sets = [p, PairPoint(u, u.copy()), PairPoint(u, -u), PairPoint(*perp)]
    for f in (f1, f5):
        for s in sets:
            before = classify_batch(s)
            after = classify_batch(f(s))
            want = np.array([SWAP[StratumLabel(c)] for c in before])
            assert np.array_equal(after, want)

    labels = classify_batch(p)
    for lab, chart in ((StratumLabel.ACUTE, acute_chart), (StratumLabel.OBTUSE, obtuse_chart)):
        sub = PairPoint(p.u[labels == lab], p.v[labels == lab])
        assert maxdist(chart_inverse(chart(sub), lab), sub) < 1e-10
        c = ChartPoint(rng.uniform(1e-3, 1 - 1e-3, N), perp)
        back = chart(chart_inverse(c, lab))
        assert np.max(np.abs(back.t - c.t)) < 1e-10
        assert maxdist(back.orthopair, perp) < 1e-10

    c = folding_map(p)
    for f in (f1, f5):
        cf = folding_map(f(p))
        assert np.max(np.abs(cf.t - c.t)) < 1e-10
        assert maxdist(cf.orthopair, f(c.orthopair)) < 1e-10
    assert time.perf_counter() - start < 2.0


@crit(5, "strata swap/preserve under f_l, chart round trips and folding equivariance (1e-10, < 2 s)")
def test_c5_chart_angle_oracle():
    # the rescaled angle from arccos of the dot product
    p = sample_pairs(stream(5), N)
    c = folding_map(p)
    theta = np.arccos(np.clip(np.sum(p.u * p.v, axis=1), -1, 1))
    t = np.where(theta < math.pi / 2, 2 * theta / math.pi, 2 - 2 * theta / math.pi)
    far = np.abs(np.abs(np.sum(p.u * p.v, axis=1)) - 1) > 1e-6
    assert np.max(np.abs(c.t - t)[far]) < 1e-8


# 6 ---------------------------------------------------------------------------

@crit(6, "double covers perp/f^2 -> perp/f, L41 -> L81, L41 -> L85 (fibre cardinality 2)")
@pytest.mark.parametrize("cover, base", [("f1sq", "f1"), ("f5sq", "f5"), ("l41", "l81"),
                                         ("l41", "l85")])
def test_c6_cover_degrees(cover, base):
    rng = stream(6)
    x = as_flat(sample_perp(rng, 2000)) if cover.startswith("f") else sample_s3(rng, 2000)
    rep = cover_check(f"{cover}->{base}", GENERATORS[cover], GENERATORS[base], x)
    assert rep.samples >= 1000
    assert dict(rep.cardinalities) == {2: rep.samples}


@crit(6, "double covers perp/f^2 -> perp/f, L41 -> L81, L41 -> L85 (fibre cardinality 2)")
def test_c6_brute_force_fibres():
    # independent count: group the base orbit's points by which cover orbit contains them
    rng = stream(6)
    for cover, base in (("l41", "l81"), ("f1sq", "f1")):
        (h, m), (g, n) = GENERATORS[cover], GENERATORS[base]
        x = as_flat(sample_perp(rng)) if cover.startswith("f") else sample_s3(rng)
        pts = orbit_stack(g, x, n)
        classes = set()
        for pt in pts:
            orb = orbit_stack(h, pt, m)
            classes.add(tuple(sorted(tuple(np.round(r, 8)) for r in orb)))
        assert len(classes) == 2


# 7 ---------------------------------------------------------------------------

@crit(7, "descent Phi(deck z) = f_l^(+-1) Phi(z) (1e-11), realized sign recorded")
@pytest.mark.parametrize("ell, sign", [(1, "f1^-1"), (5, "f5")])
def test_c7_descent(ell, sign):
    rep = descent_check(ell, sample_s3(stream(7), N), 1e-11)
    assert rep.max_error < 1e-11
    assert rep.note == f"sign={sign}"


@crit(7, "descent Phi(deck z) = f_l^(+-1) Phi(z) (1e-11), realized sign recorded")
def test_c7_descent_scalar_route():
    # Phi through the scalar conjugation route: columns 2 and 3 of spin_cover
    rng = stream(7)
    for z in sample_s3(rng, 200):
        for tag, f in (("L81", lambda p: PairPoint(p.v, -p.u)), ("L85", f5)):
            R0 = spin_cover(UnitQuaternion.from_array(z))
            R1 = spin_cover(UnitQuaternion.from_array(LENS[tag](z)))
            want = f(PairPoint(R0[:, 1], R0[:, 2]))
            assert maxdist(PairPoint(R1[:, 1], R1[:, 2]), want) < 1e-11


# 8 ---------------------------------------------------------------------------

@crit(8, "f_A along Id -> T^2 (11 steps): order 4, displacement 2, orbit bijection (1e-12, < 5 s)")
def test_c8_theorem():
    rng = stream(8)
    start = time.perf_counter()
    p = sample_pairs(rng, N)
    rep = theorem_check(11, p, rng, 1e-12)
    assert rep.max_error < 1e-12, rep.note
    for t in np.linspace(0, 1, 11):
        A = geodesic(np.eye(3), T2, float(t))
        assert order_of(ActionGenerator("FA", A), p, 1e-12) == 4
        assert np.max(np.abs(pair_distance(p, fA(A, p)) - 2)) < 1e-12
    assert time.perf_counter() - start < 5.0


@crit(8, "f_A along Id -> T^2 (11 steps): order 4, displacement 2, orbit bijection (1e-12, < 5 s)")
def test_c8_endpoint_realizes_m1_m5():
    A = geodesic(np.eye(3), T2, 1.0)
    assert np.max(np.abs(A - T2)) < 1e-12
    p = sample_pairs(stream(8), N)
    # g sends each f1-orbit onto an f5-orbit, entry by entry
    lhs, rhs = p, intertwine(T2, p)
    for _ in range(4):
        lhs, rhs = F1(lhs), F5(rhs)
        assert maxdist(intertwine(T2, lhs), rhs) < 1e-12
    assert maxdist(double_antipodal(double_antipodal(p)), p) == 0.0


# 9 ---------------------------------------------------------------------------

@crit(9, "involution defect: 0 at ends, path max 2 sqrt 2 at t = 1/2; perp-breaking witness")
def test_c9_obstruction():
    rep = obstruction_check(11, sample_perp(stream(9), 1000), 1e-12)
    assert rep.passed, rep.note
    assert "no witness" not in rep.note
    ts = np.linspace(0, 1, 11)
    defects = np.array([float(involution_defect(geodesic(np.eye(3), T2, float(t)))) for t in ts])
    assert defects[0] < 1e-12 and defects[-1] < 1e-12
    assert defects.max() >= 2
    assert ts[np.argmax(defects)] == 0.5
    assert abs(defects.max() - 2 * math.sqrt(2)) < 1e-12
    # closed form: rotation by angle pi t about e1
    oracle = np.sqrt(4 * (1 - np.cos(2 * math.pi * ts)))
    assert np.max(np.abs(defects - oracle)) < 1e-12


@crit(9, "involution defect: 0 at ends, path max 2 sqrt 2 at t = 1/2; perp-breaking witness")
def test_c9_explicit_witness():
    # the image dot product is -u . (A^2 v); at t = 1/2, A^2 = T^2 = diag(1, -1, -1)
    A = geodesic(np.eye(3), T2, 0.5)
    s = 1 / math.sqrt(2)
    p = PairPoint(np.array([s, s, 0.0]), np.array([s, -s, 0.0]))
    q = fA(A, p)
    assert abs(p.u @ p.v) < 1e-15 and abs(q.u @ q.v) > 0.1
    assert abs(abs(q.u @ q.v) - 1.0) < 1e-12


# 10 --------------------------------------------------------------------------

def _strip_timing(text):
    d = json.loads(text)
    for s in d["suites"]:
        for c in s["checks"]:
            c.pop("wall_time_ms")
    return json.dumps(d, indent=2, ensure_ascii=False)


@crit(10, "byte-identical JSON per seed, injected tolerance exits 1, verify all < 10 s")
def test_c10_deterministic_json_cli():
    cmd = [sys.executable, "-m", "s2xs2", "verify", "all", "--seed", str(SEED), "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, text=True, check=False)
    b = subprocess.run(cmd, capture_output=True, text=True, check=False)
    assert a.returncode == 0 and b.returncode == 0
    assert _strip_timing(a.stdout).encode() == _strip_timing(b.stdout).encode()


@crit(10, "byte-identical JSON per seed, injected tolerance exits 1, verify all < 10 s")
def test_c10_injected_failure():
    cmd = [sys.executable, "-m", "s2xs2", "verify", "all", "--samples", "1000"]
    assert subprocess.run(cmd, capture_output=True, check=False).returncode == 0
    bad = subprocess.run(cmd + ["--tol-identity", "1e-300"], capture_output=True, check=False)
    assert bad.returncode == 1


@crit(10, "byte-identical JSON per seed, injected tolerance exits 1, verify all < 10 s")
def test_c10_full_run_time():
    cfg = RunConfig(seed=SEED)
    start = time.perf_counter()
    results, code = run(cfg)
    elapsed = time.perf_counter() - start
    assert code == 0 and elapsed < 10.0
    assert render_json(cfg, results, timing=False) == render_json(cfg, run(cfg)[0], timing=False)
