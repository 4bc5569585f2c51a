"""Suite orchestration for the ``verify`` command.

Each suite draws its samples from its own Philox stream (keyed by the
master seed and the suite's index in :data:`SUITE_NAMES`) and returns a
list of :class:`CheckReport`.  ``tol_identity`` governs closed-form
algebraic identities; ``tol_geometry`` governs chart round trips and
lifts, which pass through normalisations and inverse trigonometry.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .actions import (
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
from .quat import SQRT_J, J
from .quotients import (
    GENERATORS,
    LENS,
    antipodal_descent_check,
    as_flat,
    canonical_rep,
    cover_report,
    descent_check,
    diag_stratum_check,
    obstruction_check,
    orbit_stack,
    quotient_eq,
    rp2_attach,
    rp2_fibre,
    theorem_check,
    ut_lift,
)
from .report import CheckReport, stopwatch
from .sampling import (
    RNG_ALGORITHM,
    make_rng,
    sample_pairs,
    sample_perp,
    sample_s3,
    sample_so3,
    sample_sphere,
)
from .so3 import (
    geodesic,
    lift_batch,
    perp_to_rotation,
    rotation_to_perp,
    spin_cover,
    t_matrix,
)
from .sphere_pairs import (
    ChartPoint,
    PairPoint,
    StratumLabel,
    acute_chart,
    barycentre,
    chart_inverse,
    classify_batch,
    folding_map,
    obtuse_chart,
)

SUITE_NAMES = ("algebra", "so3", "strata", "actions", "lens", "covers", "descent",
               "theorem", "obstruction")
PATH_STEPS = 11


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    samples: int = 10_000
    tol_identity: float = 1e-11
    tol_geometry: float = 1e-9
    suites: list = field(default_factory=lambda: list(SUITE_NAMES))
    format: str = "text"
    dump_path: str | None = None

    def __post_init__(self):
        if not isinstance(self.samples, int) or self.samples < 1:
            raise UsageError("samples must be a positive integer")
        if not (0 <= int(self.seed) < 2**64):
            raise UsageError("seed must be a 64-bit unsigned integer")
        for tol in (self.tol_identity, self.tol_geometry):
            if not (tol > 0 and math.isfinite(tol)):
                raise UsageError("tolerances must be positive and finite")
        unknown = [s for s in self.suites if s not in SUITE_NAMES]
        if unknown:
            raise UsageError(f"unknown suite(s): {', '.join(unknown)}")
        if self.format not in ("text", "json"):
            raise UsageError("format must be text or json")


def _max(x):
    x = np.asarray(x, dtype=float)
    return float(np.max(x)) if x.size else 0.0


def _pdist(p, q):
    return _max(pair_distance(p, q))


def _check(name, anchor, samples, tol, fn, note=""):
    with stopwatch() as sw:
        try:
            err = fn()
        except ArithmeticError as exc:
            # e.g. order_of finds no period at an absurdly small tolerance
            err, note = math.inf, f"{type(exc).__name__}: {exc}"
    return CheckReport(name, anchor, samples, err, tol, sw[0], note)


# -- suites ------------------------------------------------------------------

def suite_algebra(cfg, rng):
    n, tol = cfg.samples, cfg.tol_identity
    p, q, w = sample_s3(rng, n), sample_s3(rng, n), sample_s3(rng, n)
    theta = rng.uniform(0.0, 2.0 * math.pi, n)
    out = []
    basis = np.eye(4)
    one, i, j, k = basis

    def relations():
        sq = [kernels.qmul(x, x) for x in (i, j, k)]
        ijk = kernels.qmul(kernels.qmul(i, j), k)
        return _max([np.abs(s + one).max() for s in sq + [ijk]])

    out.append(_check("hamilton_relations", "i^2 = j^2 = k^2 = ijk = -1", 1, tol, relations))
    out.append(_check(
        "norm_multiplicative", "|pq| = |p||q| on S^3", n, tol,
        lambda: _max(np.abs(np.linalg.norm(kernels.qmul(p, q), axis=1) - 1.0))))
    out.append(_check(
        "sqrt_j_squared", "((1+j)/sqrt2)^2 = j", 1, tol,
        lambda: _max(np.abs(kernels.qmul(SQRT_J.as_array(), SQRT_J.as_array()) - j))))

    def fibre_invariance():
        lam = np.stack([np.cos(theta), np.sin(theta), 0 * theta, 0 * theta], axis=1)
        ii = np.broadcast_to([1.0, 0.0, 0.0], (n, 3))
        return _max(np.abs(kernels.qrotate(kernels.qmul(lam, w), ii) - kernels.qrotate(w, ii)))

    out.append(_check("hopf_fibre_invariance", "hopf(λw) = hopf(w) for λ in S^1_i", n, tol,
                      fibre_invariance))

    def isometry():
        x = sample_sphere(rng, n)
        y = sample_sphere(rng, n)
        rx, ry = kernels.qrotate(w, x), kernels.qrotate(w, y)
        return _max(np.abs(np.sum(rx * ry, axis=1) - np.sum(x * y, axis=1)))

    out.append(_check("conjugation_isometry", "x -> w^-1 x w preserves inner products on I",
                      n, tol, isometry))
    out.append(antipodal_descent_check(w, tol))
    out[-1].name = "antipodal_cover"
    return out


def suite_so3(cfg, rng):
    n, tol, gtol = cfg.samples, cfg.tol_identity, cfg.tol_geometry
    T = t_matrix()
    p, q = sample_s3(rng, n), sample_s3(rng, n)
    out = [
        _check("spin_cover_sqrt_j", "sqrt(j) -> T under S^3/-1 ≅ SO(3)", 1, tol,
               lambda: _max(np.abs(spin_cover(SQRT_J) - T))),
        _check("t_order_four", "T^4 = Id, T^2 = diag(1,-1,-1)", 1, tol,
               lambda: max(_max(np.abs(np.linalg.matrix_power(T, 4) - np.eye(3))),
                           _max(np.abs(T @ T - np.diag([1.0, -1.0, -1.0]))))),
        _check("spin_cover_antihomomorphism", "rho(pq) = rho(q) rho(p)", n, tol,
               lambda: _max(np.linalg.norm(
                   kernels.spin_cover(kernels.qmul(p, q))
                   - kernels.spin_cover(q) @ kernels.spin_cover(p), axis=(1, 2)))),
        _check("spin_cover_even", "rho(-w) = rho(w)", n, tol,
               lambda: _max(np.abs(kernels.spin_cover(-p) - kernels.spin_cover(p)))),
    ]

    def lift_fibre():
        w = lift_batch(kernels.spin_cover(p))
        return _max(np.minimum(np.abs(w - p).max(axis=1), np.abs(w + p).max(axis=1)))

    out.append(_check("lift_double_cover_fibre", "lifts of rho(w) are ±w", n, gtol, lift_fibre))

    def perp_roundtrip():
        R = sample_so3(rng, n)
        back = perp_to_rotation(rotation_to_perp(R))
        pp = sample_perp(rng, n)
        again = rotation_to_perp(perp_to_rotation(pp))
        return max(_max(np.abs(back - R)), _pdist(again, pp))

    out.append(_check("perp_so3_roundtrip", "⊥ ≅ SO(3) via frames (u x v, u, v)", n, tol,
                      perp_roundtrip))

    def geodesic_trace():
        ts = np.linspace(0.0, 1.0, 101)
        path = np.stack([geodesic(np.eye(3), T @ T, float(t)) for t in ts])
        tr = np.trace(path, axis1=1, axis2=2)
        want = 1.0 + 2.0 * np.cos(math.pi * ts)
        err = _max(np.abs(tr - want))
        if not np.all(np.diff(tr) < 0):
            err = math.inf
        return err

    out.append(_check("geodesic_trace_profile", "SO(3) connected: explicit path Id -> T^2",
                      101, gtol, geodesic_trace))
    return out


def suite_strata(cfg, rng):
    n, gtol = cfg.samples, cfg.tol_geometry
    out = []
    pairs = sample_pairs(rng, n)
    labels = classify_batch(pairs)
    acute = labels == StratumLabel.ACUTE
    obtuse = labels == StratumLabel.OBTUSE

    def partition():
        return 1.0 - float(np.mean(acute | obtuse))

    out.append(_check("generic_pairs_open", "closed strata are null sets", n, 1e-6, partition))

    def swaps():
        bad = 0
        u = sample_sphere(rng, n)
        perp = sample_perp(rng, n)
        special = {
            StratumLabel.DIAGONAL: PairPoint(u, u.copy()),
            StratumLabel.ANTIDIAGONAL: PairPoint(u, -u),
            StratumLabel.PERP: PairPoint(*perp),
        }
        swap = {StratumLabel.DIAGONAL: StratumLabel.ANTIDIAGONAL,
                StratumLabel.ANTIDIAGONAL: StratumLabel.DIAGONAL,
                StratumLabel.PERP: StratumLabel.PERP,
                StratumLabel.ACUTE: StratumLabel.OBTUSE,
                StratumLabel.OBTUSE: StratumLabel.ACUTE}
        for f in (f1, f5):
            for lab, pts in special.items():
                bad += int(np.sum(classify_batch(f(pts)) != swap[lab]))
            new = classify_batch(f(pairs))
            want = np.vectorize(lambda c: swap[StratumLabel(c)])(labels)
            bad += int(np.sum(new != want))
        return float(bad)

    out.append(_check("strata_under_f", "f swaps Δ/Δ̄ and A/O and preserves ⊥", n, 0.5, swaps,
                      "error counts misclassified images"))

    def roundtrips():
        pa = PairPoint(pairs.u[acute], pairs.v[acute])
        po = PairPoint(pairs.u[obtuse], pairs.v[obtuse])
        e = [_pdist(chart_inverse(acute_chart(pa), StratumLabel.ACUTE), pa),
             _pdist(chart_inverse(obtuse_chart(po), StratumLabel.OBTUSE), po)]
        c = ChartPoint(rng.uniform(1e-3, 1 - 1e-3, n), sample_perp(rng, n))
        for which, chart in ((StratumLabel.ACUTE, acute_chart), (StratumLabel.OBTUSE, obtuse_chart)):
            back = chart(chart_inverse(c, which))
            e.append(_max(np.abs(back.t - c[0])))
            e.append(_pdist(back.orthopair, c[1]))
        return max(e)

    out.append(_check("chart_roundtrips", "A ≅ (0,1) x ⊥ ≅ O", n, gtol, roundtrips))

    def folding():
        gen = PairPoint(pairs.u[acute | obtuse], pairs.v[acute | obtuse])
        c = folding_map(gen)
        e = [0.0]
        for f in (f1, f5):
            cf = folding_map(f(gen))
            e.append(_max(np.abs(cf.t - c.t)))
            e.append(_pdist(cf.orthopair, f(c.orthopair)))
        return max(e)

    out.append(_check("folding_equivariance", "folding A ⊔ O -> (0,1) x ⊥ is f-equivariant",
                      n, gtol, folding))
    return out


def suite_actions(cfg, rng):
    n, tol = cfg.samples, cfg.tol_identity
    pairs = sample_pairs(rng, n)
    A = sample_so3(rng, n)
    anti = double_antipodal(pairs)
    out = [
        _check("f1_f5_square_law", "f1^2 = f5^2 = (u,v) -> (-u,-v)", n, tol,
               lambda: max(_pdist(f1(f1(pairs)), anti), _pdist(f5(f5(pairs)), anti),
                           _pdist(f1(f1(pairs)), f5(f5(pairs))))),
        _check("fa_square_law", "f_A^2 = (u,v) -> (-u,-v)", n, tol,
               lambda: _pdist(fA(A, fA(A, pairs)), anti)),
        _check("fa_generator_agreement", "f_Id = f1, f_(T^2) = f5", n, tol,
               lambda: max(_pdist(fA(np.eye(3), pairs), f1(pairs)), _pdist(fA(T2, pairs), f5(pairs)))),
        _check("fa_displacement", "|p - f_A(p)| = 2, so f_A acts freely", n, tol,
               lambda: _max(np.abs(pair_distance(pairs, fA(A, pairs)) - 2.0))),
    ]

    def orders():
        gens = [F1, F5, ActionGenerator("FA", A[0]), ActionGenerator("FA", A[1 % n])]
        return float(sum(abs(order_of(g, pairs, tol) - 4) for g in gens))

    out.append(_check("order_four", "f5 has order 4, just as f1", n, 0.5, orders))

    def equivariance():
        return _pdist(intertwine(A, f1(pairs)), fA(A, intertwine(A, pairs)))

    out.append(_check("intertwiner_equivariance", "g_A f1 = f_A g_A", n, tol, equivariance))
    return out


def suite_lens(cfg, rng):
    n, tol = cfg.samples, cfg.tol_identity
    z = sample_s3(rng, n)
    out = []
    for tag in ("L21", "L41", "L81", "L85"):
        model = LENS[tag]

        def order_err(model=model):
            x, mind = z, math.inf
            for k in range(1, model.order + 1):
                x = model(x)
                d = np.linalg.norm(x - z, axis=1)
                if k < model.order:
                    mind = min(mind, float(d.min()))
            err = _max(d)
            return err if mind > 0.5 else math.inf

        out.append(_check(f"deck_order_{tag}", f"{tag} deck has exact order {model.order}, free",
                          n, tol, order_err))
    jz = kernels.qmul(J.as_array(), z)
    out.append(_check("l85_square_is_j", "L85 deck squared = left mult by j", n, tol,
                      lambda: _max(np.abs(LENS["L85"](LENS["L85"](z)) - jz))))
    return out


def suite_covers(cfg, rng):
    n, tol = cfg.samples, cfg.tol_identity
    m = max(1, min(n, 2000))
    perp = as_flat(sample_perp(rng, m))
    z = sample_s3(rng, m)
    g = GENERATORS
    out = [
        cover_report("perp_f1sq_to_f1", g["f1sq"], g["f1"], perp),
        cover_report("perp_f5sq_to_f5", g["f5sq"], g["f5"], perp),
        cover_report("L21_to_L41", g["l21"], g["l41"], z),
        cover_report("L41_to_L81", g["l41"], g["l81"], z),
        cover_report("L41_to_L85", g["l41"], g["l85"], z),
    ]

    def rp2():
        pp = sample_perp(rng, n)
        errs = []
        for f in (f1, f5):
            errs.append(_max(np.abs(barycentre(f(f(pp))) + barycentre(pp))))
        for k in range(min(n, 50)):
            p0 = PairPoint(pp.u[k], pp.v[k])
            if rp2_attach(p0) != rp2_attach(f1(f1(p0))):
                errs.append(math.inf)
        mm = sample_sphere(rng, n)
        d = sample_sphere(rng, n)
        d -= np.sum(d * mm, axis=1, keepdims=True) * mm
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        fib = rp2_fibre(mm, d)
        bary = (fib.u + fib.v) / np.linalg.norm(fib.u + fib.v, axis=1, keepdims=True)
        errs.append(_max(np.abs(bary - mm)))
        errs.append(_max(np.abs(np.sum(fib.u * fib.v, axis=1))))
        return max(errs)

    out.append(_check("rp2_attaching_map", "⊥/f^2 -> RP^2, (u,v) -> ±(u+v)/|u+v|", n, tol, rp2))
    u = sample_sphere(rng, n)
    out.append(diag_stratum_check(1, u, tol))
    out.append(diag_stratum_check(5, u, tol))
    out.append(antipodal_descent_check(sample_s3(rng, n), tol))

    def utlift():
        w = sample_s3(rng, min(n, 500))
        ii = np.broadcast_to([1.0, 0.0, 0.0], w.shape[:-1] + (3,))
        kk = np.broadcast_to([0.0, 0.0, 1.0], w.shape[:-1] + (3,))
        a, b = kernels.qrotate(w, ii), kernels.qrotate(w, kk)
        e = 0.0
        for r in range(len(w)):
            l0, _ = ut_lift(a[r], b[r])
            l0 = l0.as_array()
            e = max(e, min(np.abs(l0 - w[r]).max(), np.abs(l0 + w[r]).max()))
        return e

    out.append(_check("ut_lift_roundtrip", "UTS^2 ≅ S^3/-1 via ±w", min(n, 500), cfg.tol_geometry,
                      utlift))

    def canonical():
        gen, order = g["f1"]
        pts = as_flat(sample_pairs(rng, n))
        shift = rng.integers(0, 4, n)
        same = rng.random(n) < 0.5
        stack = orbit_stack(gen, pts, order)
        partner = stack[shift, np.arange(n)]
        partner[~same] = as_flat(sample_pairs(rng, int((~same).sum())))
        eq = quotient_eq(pts, partner, gen, order)
        rep_p = canonical_rep(stack)
        rep_q = canonical_rep(orbit_stack(gen, partner, order))
        rep_eq = np.abs(rep_p - rep_q).max(axis=1) < 1e-9
        return float(np.sum(eq != rep_eq)) + float(np.sum(eq != same))

    out.append(_check("canonical_rep_stability", "quotient equality = equal canonical reps",
                      n, 0.5, canonical))
    return out


def suite_descent(cfg, rng):
    z = sample_s3(rng, cfg.samples)
    return [descent_check(1, z, cfg.tol_identity), descent_check(5, z, cfg.tol_identity)]


def suite_theorem(cfg, rng):
    pairs = sample_pairs(rng, cfg.samples)
    return [theorem_check(PATH_STEPS, pairs, rng, cfg.tol_identity)]


def suite_obstruction(cfg, rng):
    perp = sample_perp(rng, min(cfg.samples, 1000))
    rep = obstruction_check(PATH_STEPS, perp, cfg.tol_identity)
    return [rep]


SUITES = {
    "algebra": suite_algebra,
    "so3": suite_so3,
    "strata": suite_strata,
    "actions": suite_actions,
    "lens": suite_lens,
    "covers": suite_covers,
    "descent": suite_descent,
    "theorem": suite_theorem,
    "obstruction": suite_obstruction,
}


def run(cfg):
    """Run the configured suites; returns ``(results, exit_code)``.

    ``results`` is a list of ``(suite_name, [CheckReport, ...])``.
    """
    results = []
    for name in cfg.suites:
        rng = make_rng(cfg.seed, SUITE_NAMES.index(name), 0)
        results.append((name, SUITES[name](cfg, rng)))
    ok = all(r.passed for _, reps in results for r in reps)
    return results, 0 if ok else 1


def report_dict(cfg, results, timing=True):
    all_pass = all(r.passed for _, reps in results for r in reps)
    return {
        "seed": int(cfg.seed),
        "samples": cfg.samples,
        "tolerances": {"identity": cfg.tol_identity, "geometry": cfg.tol_geometry},
        "rng": RNG_ALGORITHM,
        "backend": kernels.BACKEND,
        "suites": [{"name": name, "checks": [r.as_dict(timing) for r in reps]}
                   for name, reps in results],
        "all_pass": all_pass,
    }


def render_json(cfg, results, timing=True):
    return json.dumps(report_dict(cfg, results, timing), indent=2, ensure_ascii=False) + "\n"


def render_text(cfg, results):
    lines = [f"seed={cfg.seed} samples={cfg.samples} backend={kernels.BACKEND}"]
    for name, reps in results:
        lines.append(f"[{name}]")
        for r in reps:
            flag = "PASS" if r.passed else "FAIL"
            lines.append(f"  {flag} {r.name:<34} err={r.max_error:.3e} tol={r.tolerance:.1e} "
                         f"n={r.samples} {r.wall_time_ms:8.1f} ms  {r.note}".rstrip())
    ok = all(r.passed for _, reps in results for r in reps)
    lines.append("ALL PASS" if ok else "FAILURES PRESENT")
    return "\n".join(lines) + "\n"


# -- orbit dumps ---------------------------------------------------------------

_BASE_POINTS = {
    "pair": np.array([1.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
    "s3": np.array([1.0, 0.0, 0.0, 0.0]),
}


def orbit_rows(generator_name, count, seed=0):
    """Orbit rows ``(orbit_id, step, *coords)``; the first orbit starts at a fixed base point."""
    gen, order = GENERATORS[generator_name]
    kind = "s3" if generator_name.startswith("l") else "pair"
    rng = make_rng(seed, len(SUITE_NAMES), 0)
    rows = []
    for oid in range(count):
        if oid == 0:
            x = _BASE_POINTS[kind]
        elif kind == "s3":
            x = sample_s3(rng)
        else:
            x = as_flat(sample_pairs(rng))
        stack = orbit_stack(gen, x, order)
        for step, pt in enumerate(stack):
            rows.append((oid, step, *pt.tolist()))
    return kind, rows


def orbits_csv(generator_name, count, seed=0):
    kind, rows = orbit_rows(generator_name, count, seed)
    header = (["orbit_id", "step", "x1", "x2", "x3", "y1", "y2", "y3"] if kind == "pair"
              else ["orbit_id", "step", "a", "b", "c", "d"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for oid, step, *vals in rows:
        w.writerow([oid, step, *(f"{v + 0.0:.17g}" for v in vals)])
    return buf.getvalue()


def dump_orbits(cfg, generator_name, count, path):
    text = orbits_csv(generator_name, count, cfg.seed)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text
