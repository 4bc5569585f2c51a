"""Command line entry point.

    s2xs2 verify <suite|all> [--seed N] [--samples N] [--tol-identity X]
                 [--tol-geometry X] [--format text|json] [--dump PATH]
    s2xs2 orbit <f1|f5|l21|l41|l81|l85> [--count N] [--seed N] [--dump PATH]

Exit codes: 0 all checks pass, 1 a check failed or an I/O error occurred,
2 usage error.
"""

import argparse
import os
import sys

from .harness import (
    SUITE_NAMES,
    RunConfig,
    UsageError,
    dump_orbits,
    orbits_csv,
    render_json,
    render_text,
    run,
)

ORBIT_GENERATORS = ("f1", "f5", "l21", "l41", "l81", "l85")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser():
    ap = _Parser(prog="s2xs2", description="Verify the Z/4 quotients of S^2 x S^2 numerically.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suite", choices=SUITE_NAMES + ("all",))
    v.add_argument("--seed", type=_seed, default=0)
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--tol-identity", type=float, default=1e-11)
    v.add_argument("--tol-geometry", type=float, default=1e-9)
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--dump", metavar="PATH", help="also write the report to PATH")

    o = sub.add_parser("orbit", help="print or dump sample orbits as CSV")
    o.add_argument("generator", choices=ORBIT_GENERATORS)
    o.add_argument("--count", type=int, default=1)
    o.add_argument("--seed", type=_seed, default=0)
    o.add_argument("--dump", metavar="PATH")
    return ap


def _writable(path):
    parent = os.path.dirname(os.path.abspath(path))
    if os.path.isdir(path) or not os.path.isdir(parent):
        return False
    if os.path.exists(path):
        return os.access(path, os.W_OK)
    return os.access(parent, os.W_OK)


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        suites = list(SUITE_NAMES) if args.suite == "all" else [args.suite]
        try:
            cfg = RunConfig(seed=args.seed, samples=args.samples, tol_identity=args.tol_identity,
                            tol_geometry=args.tol_geometry, suites=suites, format=args.format,
                            dump_path=args.dump)
        except UsageError as exc:
            print(f"s2xs2: error: {exc}", file=sys.stderr)
            return 2
        if cfg.dump_path and not _writable(cfg.dump_path):
            print(f"s2xs2: error: cannot write {cfg.dump_path}", file=sys.stderr)
            return 2
        results, code = run(cfg)
        text = render_json(cfg, results) if cfg.format == "json" else render_text(cfg, results)
        sys.stdout.write(text)
        if cfg.dump_path:
            try:
                with open(cfg.dump_path, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(text)
            except OSError as exc:
                print(f"s2xs2: error: {exc}", file=sys.stderr)
                return 1
        return code

    if args.count < 1:
        print("s2xs2: error: --count must be positive", file=sys.stderr)
        return 2
    if args.dump:
        try:
            dump_orbits(RunConfig(seed=args.seed, suites=[]), args.generator, args.count, args.dump)
        except OSError as exc:
            print(f"s2xs2: error: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(orbits_csv(args.generator, args.count, args.seed))
    return 0


if __name__ == "__main__":
    sys.exit(main())
