"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py --n 100000 --repeat 5
"""

import argparse
import json
import timeit

import numpy as np

from s2xs2 import kernels
from s2xs2.sampling import make_rng, sample_pairs, sample_s3, sample_so3


def workload(n, seed):
    rng = make_rng(seed)
    p, q = sample_s3(rng, n), sample_s3(rng, n)
    x = sample_pairs(rng, n).u
    A = sample_so3(rng, n)
    pairs = sample_pairs(rng, n)
    R = kernels.spin_cover(p)
    return {
        "qmul": lambda: kernels.qmul(p, q),
        "qrotate": lambda: kernels.qrotate(p, x),
        "spin_cover": lambda: kernels.spin_cover(p),
        "lift": lambda: kernels.lift(R),
        "fa_apply": lambda: kernels.fa_apply(A, pairs.u, pairs.v),
    }


def bench(n, repeat, seed):
    rows = {}
    for backend in ("python", "cython"):
        try:
            kernels.use(backend)
        except ImportError:
            print(f"backend {backend} unavailable, skipped")
            continue
        for name, fn in workload(n, seed).items():
            fn()
            best = min(timeit.repeat(fn, number=1, repeat=repeat))
            rows.setdefault(name, {})[backend] = best
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    start = kernels.BACKEND
    try:
        rows = bench(args.n, args.repeat, args.seed)
    finally:
        kernels.use(start)
    if args.json:
        print(json.dumps({"n": args.n, "timings_s": rows}, indent=2))
        return
    print(f"n={args.n}  best of {args.repeat}")
    print(f"{'kernel':<12}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, t in rows.items():
        py, cy = t.get("python", np.nan), t.get("cython", np.nan)
        print(f"{name:<12}{1e3 * py:12.3f}{1e3 * cy:12.3f}{py / cy:10.1f}x")


if __name__ == "__main__":
    main()
