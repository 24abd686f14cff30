"""``rqkp`` command line: solve, gen, verify, bench, phi-scan."""

import argparse
import csv
import sys

import numpy as np

from . import bench as _bench
from .config import DEFAULT, SolverConfig, Tolerances
from .driver import solve
from .dual import eval_phi
from .exceptions import ParseError, RqkpError
from .generate import GenSpec, InstanceType, generate
from .model import GeneralInstance, Status, compact, reduce
from .oracle import kkt_enumerate
from .serialize import parse_instance, serialize_instance, serialize_report

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_NEAR = 2
EXIT_INFEASIBLE = 3
EXIT_USAGE = 64

_STATUS_EXIT = {
    Status.OPTIMAL: EXIT_OK,
    Status.NEAR_OPTIMAL: EXIT_NEAR,
    Status.INFEASIBLE: EXIT_INFEASIBLE,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _read_instance(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(text)


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def cmd_solve(args):
    inst = _read_instance(args.input)
    cfg = DEFAULT
    if args.tol is not None:
        cfg = SolverConfig(tol=Tolerances(gap=args.tol))
    trace = [] if args.trace_events else None
    rep = solve(inst, cfg, trace_events=trace)
    _write(args.output, serialize_report(rep))
    if trace is not None:
        with open(args.trace_events, "w", newline="\n") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["lambda", "id_low", "id_high", "phi"])
            for lam, lo, hi, phi in trace:
                w.writerow([format(lam, ".17g"), int(lo), int(hi), format(phi, ".17g")])
    print(f"{rep.status.value} objective={rep.objective:.12g} gap={rep.gap:.3g} "
          f"phase={rep.phase} events={rep.events_processed}", file=sys.stderr)
    return _STATUS_EXIT[rep.status]


def cmd_gen(args):
    inst = generate(GenSpec(args.type, args.n, args.seed))
    _write(args.out, serialize_instance(inst))
    return EXIT_OK


def verify(n_max, trials, seed, kind="mixed", progress=None):
    """Compare ``solve`` with the enumeration oracle on generated instances.

    Returns ``(failures, worst_relative_error)``.
    """
    rng = np.random.default_rng(seed)
    failures = []
    worst = 0.0
    for t in range(trials):
        n = int(rng.integers(2, n_max + 1))
        typ = (1 + t % 2) if kind == "mixed" else int(kind)
        inst = generate(GenSpec(typ, n, int(rng.integers(0, 2**63))))
        rep = solve(inst)
        r = reduce(inst)
        ref = kkt_enumerate(r).objective + r.offset
        err = abs(rep.objective - ref) / (1.0 + abs(ref))
        worst = max(worst, err)
        if rep.status != Status.OPTIMAL or not err <= 1e-6:
            failures.append((t, n, typ, rep.status.value, err))
        if progress is not None:
            progress(t)
    return failures, worst


def cmd_verify(args):
    if not 2 <= args.n_max <= 12:
        raise UsageError("--n-max must be between 2 and 12")
    failures, worst = verify(args.n_max, args.trials, args.seed, args.type)
    for t, n, typ, status, err in failures[:20]:
        print(f"FAIL trial={t} n={n} type={typ} status={status} rel_err={err:.3g}")
    verdict = "PASS" if not failures else "FAIL"
    print(f"{verdict}: {args.trials - len(failures)}/{args.trials} trials agree with the "
          f"enumeration oracle; worst relative error {worst:.3g}")
    return EXIT_OK if not failures else EXIT_FAIL


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def cmd_bench(args):
    def progress(row):
        print(f"n={row.n} type={row.type} time_ms={row.time_ms:.1f} events={row.events} "
              f"status={row.status}", file=sys.stderr)

    rows = _bench.bench(args.sizes, args.reps, args.types, args.seed,
                        progress=None if args.quiet else progress)
    _write(args.out, _bench.to_csv(rows))
    problem = _bench.check_rows(rows)
    if problem:
        print(f"bench: {problem}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_phi_scan(args):
    inst = _read_instance(args.input)
    r = reduce(inst) if isinstance(inst, GeneralInstance) else compact(inst)
    lams = np.linspace(args.lo, args.hi, args.points)
    lines = ["lambda,phi,piece"]
    for lam in lams:
        e = eval_phi(r, lam)
        lines.append(f"{format(float(lam), '.17g')},{format(e.phi, '.17g')},{e.piece.value}")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser():
    p = _Parser(prog="rqkp", description="Rank-one quadratic knapsack solver toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("--input", required=True)
    s.add_argument("--output", default="-")
    s.add_argument("--tol", type=float, help="relative duality-gap tolerance")
    s.add_argument("--trace-events", metavar="FILE", help="CSV of every sweep event")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", help="write a generated instance")
    g.add_argument("--type", type=int, choices=(1, 2), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="cross-check solve against the enumeration oracle")
    v.add_argument("--n-max", type=int, default=8)
    v.add_argument("--trials", type=int, default=2000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--type", choices=("1", "2", "mixed"), default="mixed")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="time solves on generated instances")
    b.add_argument("--sizes", type=_int_list, default=list(_bench.TABLE_SIZES))
    b.add_argument("--reps", type=int, default=10)
    b.add_argument("--types", type=_int_list, default=[1, 2])
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", default="-")
    b.add_argument("--quiet", action="store_true")
    b.set_defaults(func=cmd_bench)

    f = sub.add_parser("phi-scan", help="tabulate the dual function")
    f.add_argument("--input", required=True)
    f.add_argument("--lo", type=float, required=True)
    f.add_argument("--hi", type=float, required=True)
    f.add_argument("--points", type=int, default=201)
    f.add_argument("--out", default="-")
    f.set_defaults(func=cmd_phi_scan)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"rqkp: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RqkpError as exc:
        print(f"rqkp: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
