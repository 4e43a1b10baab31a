"""Command-line front end: ``hiddenshift <command> [options]``.

Exit codes: 0 ok, 2 bad arguments, 3 no solution, 4 cap exceeded,
5 budget exceeded.
"""

import argparse
import csv
import io
import json
import secrets
import sys
from fractions import Fraction

from . import etastats, intprog, lattice, msp, quantum
from .errors import BudgetExceeded, DimensionTooLarge, sweep_budget

EXIT_OK, EXIT_ARGS, EXIT_NO_SOLUTION, EXIT_CAP, EXIT_BUDGET = 0, 2, 3, 4, 5

CENSUS_FIELDS = [
    "N", "M", "k", "mode", "samples", "mu_hat", "sigma2_hat", "p0", "p1to4",
    "p5plus", "cheb_ok", "przero_ok", "m2lower_ok", "seed",
]


class UsageError(Exception):
    pass


def num(v):
    """Probabilities and moments as floats with 12 significant digits."""
    return float(f"{float(v):.12g}")


def rational(v):
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def fraction_arg(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational number, got {text!r}")


def seed_arg(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _add_common(p, fmt="json"):
    p.add_argument("--seed", type=seed_arg, default=0)
    p.add_argument("--entropy", action="store_true", help="seed from OS entropy (reported in output)")
    p.add_argument("--format", choices=["json", "csv"], default=fmt)
    p.add_argument("--budget", type=int, default=None, help="sweep budget override (also $HSL_BUDGET)")
    p.add_argument("--workers", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(prog="hiddenshift", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one matrix sum instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=int_list, required=True)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--method", choices=["ip", "brute", "auto"], default="auto")
    p.add_argument("--cap", type=int, default=16)
    p.add_argument("--count-only", action="store_true")
    _add_common(p)

    p = sub.add_parser("census", help="distribution of eta over random instances")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--samples", type=int)
    p.add_argument("--cap", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("pgm", help="PGM success probability and its bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--samples", type=int)
    _add_common(p)

    p = sub.add_parser("simulate", help="sample the end-to-end pipeline")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--approx", action="store_true", help="only 1 <= eta <= 4 instances are sampled")
    _add_common(p)

    p = sub.add_parser("fourier", help="single-copy Fourier sampling distribution")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    _add_common(p, fmt="csv")

    p = sub.add_parser("lattice", help="inspect the homogeneous solution lattice")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=int_list, required=True)
    p.add_argument("--delta", type=fraction_arg, default=lattice.DEFAULT_DELTA)
    _add_common(p)
    return parser


def _resolve_m(args):
    m = args.m if args.m is not None else etastats.default_m(args.n, args.k)
    if args.n < 2 or args.k < 1 or not 1 <= m <= args.n:
        raise UsageError(f"need N >= 2, k >= 1, 1 <= M <= N (got N={args.n}, M={m}, k={args.k})")
    return m


def _lattice_json(lat):
    return {
        "b0": list(lat.b0) if lat.b0 is not None else None,
        "basis": [list(v) for v in lat.basis],
        "det": lat.det_abs,
    }


def cmd_solve(args, out):
    if args.cap < 1:
        raise UsageError("--cap must be at least 1")
    try:
        inst = msp.make_instance(args.n, args.m, args.k, args.x, args.w)
    except msp.InvalidInstance as exc:
        raise UsageError(str(exc))
    lat = msp.solution_lattice(inst)
    report = {"eta": None, "solutions": [], "truncated": False, "lattice": _lattice_json(lat)}
    code = EXIT_OK
    if args.count_only:
        n = msp.eta(inst)
        sols = intprog.lattice_points(lat, intprog.Box.cube(inst.M, inst.k), args.cap)
        report.update(eta=n, solutions=[list(b) for b in sols], truncated=n > len(sols))
    else:
        try:
            if args.method == "brute":
                res = msp.brute_solutions(inst)
                if res.eta > args.cap:
                    raise msp.CapExceeded(args.cap, args.cap + 1, res.solutions[:args.cap])
            else:
                res = intprog.enumerate_box_solutions(inst, args.cap)
            report.update(eta=res.eta, solutions=[list(b) for b in res.solutions])
        except msp.CapExceeded as exc:
            report.update(eta_at_least=exc.cap + 1, solutions=[list(b) for b in exc.solutions],
                          truncated=True)
            code = EXIT_CAP
    if report["eta"] == 0:
        code = EXIT_NO_SOLUTION
    _emit_json(report, out)
    return code


def census_row(census, report, seed):
    return {
        "N": census.N, "M": census.M, "k": census.k, "mode": census.mode,
        "samples": census.samples, "mu_hat": num(census.mu_hat),
        "sigma2_hat": num(census.sigma2_hat), "p0": num(census.p_zero),
        "p1to4": num(census.p_1to4), "p5plus": num(census.p_5plus),
        "cheb_ok": report.cheb_ok, "przero_ok": report.przero_ok,
        "m2lower_ok": report.m2lower_ok, "seed": seed,
    }


def cmd_census(args, out):
    M = _resolve_m(args)
    if args.exhaustive:
        census = etastats.census_exhaustive(args.n, M, args.k, args.budget)
    else:
        if args.samples < 1:
            raise UsageError("--samples must be positive")
        census = etastats.census_monte_carlo(args.n, M, args.k, args.samples, args.seed,
                                             cap=args.cap, workers=args.workers)
    report = etastats.bound_report(census)
    row = census_row(census, report, args.seed)
    if args.format == "csv":
        w = csv.DictWriter(out, fieldnames=CENSUS_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerow({k: _csv_cell(v) for k, v in row.items()})
        return EXIT_OK
    row.update(
        exact=census.exact,
        histogram={str(v): c for v, c in sorted(census.histogram.items())},
        stderr={k: num(v) for k, v in census.stderr().items()},
        variance_ok=report.variance_ok, p1to4_ok=report.p1to4_ok,
        bounds={
            "chebyshev_p5": None if report.chebyshev_p5_bound is None else num(report.chebyshev_p5_bound),
            "pr_zero": num(report.pr_zero_bound),
            "second_moment_lower": num(report.second_moment_lower),
            "variance_ref": num(report.variance_upper_ref),
            "p1to4_ref": report.p_1to4_ref,
        },
        slack={k: num(v) for k, v in report.slack.items()},
        rational={"mu_hat": rational(census.mu_hat), "sigma2_hat": rational(census.sigma2_hat),
                  "p0": rational(census.p_zero), "p1to4": rational(census.p_1to4),
                  "p5plus": rational(census.p_5plus)},
    )
    _emit_json(row, out)
    return EXIT_OK


def cmd_pgm(args, out):
    M = _resolve_m(args)
    if args.exhaustive:
        rep = quantum.pgm_success_exact(args.n, M, args.k, "exhaustive", budget=args.budget)
    else:
        if args.samples < 1:
            raise UsageError("--samples must be positive")
        rep = quantum.pgm_success_exact(args.n, M, args.k, "monte_carlo", args.samples, args.seed)
    doc = {
        "N": rep.N, "M": rep.M, "k": rep.k, "mode": rep.mode,
        "success_exact": num(rep.success_exact),
        "lower_bound": num(rep.lower_bound), "upper_bound": num(rep.upper_bound),
        "alpha": 1, "beta": num(rep.beta),
        "within_bounds": rep.lower_bound - 1e-9 <= rep.success_exact <= rep.upper_bound + 1e-9,
    }
    if rep.mode == "monte_carlo":
        doc.update(samples=rep.sample_count, stderr=num(rep.stderr), seed=rep.seed)
    _emit_json(doc, out)
    return EXIT_OK


def cmd_simulate(args, out):
    M = _resolve_m(args)
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    partition = quantum.GoodBadPartition() if args.approx else None
    res = quantum.simulate(args.n, M, args.k, args.s % args.n, args.trials, args.seed, partition)
    doc = {"trials": res["trials"], "successes": res["successes"], "rate": num(res["rate"]),
           "expected": None, "N": args.n, "M": M, "k": args.k, "s": args.s % args.n,
           "seed": args.seed}
    budget = sweep_budget(args.budget)
    if args.n**args.k <= budget:
        doc["expected"] = num(quantum.pgm_success_exact(args.n, M, args.k, budget=budget).success_exact)
    if args.approx:
        doc["bottom"] = res["failures"]
        if args.n**args.k <= budget:
            doc["fidelity"] = num(quantum.approx_fidelity(args.n, M, args.k, partition, budget=budget))
            doc["expected_approx"] = num(quantum.pgm_success_exact(
                args.n, M, args.k, budget=budget, partition=partition).success_exact)
        else:
            doc["fidelity"] = num(quantum.approx_fidelity(args.n, M, args.k, partition, "monte_carlo",
                                                          seed=args.seed))
    _emit_json(doc, out)
    return EXIT_OK


def cmd_fourier(args, out):
    if args.n < 1 or not 1 <= args.m <= args.n:
        raise UsageError("need 1 <= M <= N")
    table = quantum.single_copy_fourier(args.n, args.m, args.s % args.n)
    N = args.n
    hit = sum(table[(-args.s * z) % N, z] for z in range(N))
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["y", "z", "prob"])
        for y in range(N):
            for z in range(N):
                w.writerow([y, z, num(table[y, z])])
        out.write(f"# pr_y_eq_minus_sz={num(hit)},m_over_n={num(args.m / N)}\n")
        return EXIT_OK
    _emit_json({
        "N": N, "M": args.m, "s": args.s % N,
        "table": [[y, z, num(table[y, z])] for y in range(N) for z in range(N)],
        "pr_y_eq_minus_sz": num(hit), "m_over_n": num(args.m / N),
        "total": num(table.sum()),
    }, out)
    return EXIT_OK


def cmd_lattice(args, out):
    if args.n < 2 or not args.x:
        raise UsageError("need N >= 2 and a non-empty --x")
    if not Fraction(1, 4) < args.delta <= 1:
        raise UsageError("--delta must lie in (1/4, 1]")
    x = [v % args.n for v in args.x]
    basis = msp.homogeneous_basis(x, args.n)
    res = lattice.lll_reduce(basis, args.delta)
    _emit_json({
        "N": args.n, "x": x, "delta": rational(args.delta),
        "basis": [list(v) for v in basis],
        "reduced": [list(v) for v in res.reduced],
        "transform": [list(v) for v in res.transform],
        "det_before": abs(lattice.determinant(basis)),
        "det_after": abs(lattice.determinant(res.reduced)),
        "reduced_ok": lattice.check_reduced(res.reduced, args.delta),
    }, out)
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve, "census": cmd_census, "pgm": cmd_pgm,
    "simulate": cmd_simulate, "fourier": cmd_fourier, "lattice": cmd_lattice,
}


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return "" if v is None else v


def _emit_json(doc, out):
    json.dump(doc, out, sort_keys=False)
    out.write("\n")


def main(argv=None, out=None):
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ARGS
    if args.entropy:
        args.seed = secrets.randbits(64)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (BudgetExceeded, DimensionTooLarge, msp.TooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


def run(argv=None):
    """Capture output: returns (exit code, stdout text)."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
