"""Command line: ``subcrit {constants,count,sample,experiment,verify}``.

Reports go to stdout as JSON unless ``--out`` names a file.  Exit status:
0 pass, 1 fail (including exhausted sampling budgets), 2 usage, 3 numeric.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .. import __version__
from ..analytic import DEFAULT_ORDER, compute_family
from ..errors import BudgetExhausted, DomainError, NumericError, UnsupportedFeature, UsageError
from ..series import EXACT, FLOAT
from ..species import cb_series, cv_series, get_class, unrooted_count_series
from . import experiments as ex
from .report import _jsonable
from .verify import run_verify

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


def _emit(payload, out: str | None, indent: int | None = 2):
    text = json.dumps(payload, default=_jsonable, indent=indent)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _number(c):
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else str(c)
    return float(c)


def cmd_constants(args) -> int:
    report = ex.run_constants(args.cls, args.order)
    _emit(report.to_dict(), args.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_count(args) -> int:
    cls = get_class(args.cls)
    mode = EXACT if args.mode == "rational" else FLOAT
    if mode == FLOAT and args.n > 150:
        # large float orders use the rescaled variable; report values in z
        fam = compute_family(cls, args.n, FLOAT)
        rooted = [fam.coefficient(n) for n in range(args.n + 1)]
        payload = {"class": cls.name, "mode": args.mode, "n": args.n, "theta": float(fam.theta), "rooted": rooted}
        _emit(payload, args.out)
        return EXIT_PASS
    fam = compute_family(cls, args.n, mode, theta=None if mode == EXACT else 1.0)
    payload = {"class": cls.name, "mode": args.mode, "n": args.n,
               "rooted": [_number(c) for c in fam.rooted.coeffs],
               "cv": [_number(c) for c in cv_series(cls, fam).coeffs]}
    try:
        payload["cb"] = [_number(c) for c in cb_series(cls, fam).coeffs]
        payload["unrooted"] = [_number(c) for c in unrooted_count_series(cls, fam).coeffs]
    except UnsupportedFeature as exc:
        payload["unrooted"] = None
        payload["note"] = str(exc)
    _emit(payload, args.out)
    return EXIT_PASS


def cmd_sample(args) -> int:
    from .. import samplers as smp

    rng = smp.make_rng(args.seed)
    graphs = []
    for _ in range(args.count):
        if args.rooted:
            g = smp.sample_rooted_sized(args.cls, args.size, args.window, rng)
        else:
            g = smp.sample_unrooted_sized(args.cls, args.size, args.method, rng, window=args.window)
        graphs.append(g)
    if args.format == "graph6":
        text = "\n".join(g.to_graph6() for g in graphs)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return EXIT_PASS
    payload = {"class": get_class(args.cls).name, "seed": args.seed, "size": args.size, "window": args.window,
               "rooted": args.rooted, "method": None if args.rooted else args.method, "version": __version__,
               "graphs": [g.to_dict() for g in graphs], "meta": [g.meta for g in graphs]}
    _emit(payload, args.out, indent=None)
    return EXIT_PASS


def cmd_experiment(args) -> int:
    common = {"samples": args.samples, "seed": args.seed}
    if args.name == "rayleigh":
        r = ex.run_rayleigh(args.cls, args.n, window=args.window, method=args.method, **common)
    elif args.name == "diameter":
        r = ex.run_diameter_tail(args.cls, args.n, window=args.window, method=args.method, **common)
    elif args.name == "bs-census":
        r = ex.run_bs_census(args.cls, args.n, args.k, window=args.window, **common)
    else:
        r = ex.run_fragments(args.cls, args.n, **common)
    _emit(r.to_dict(), args.out)
    return EXIT_PASS if r.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    result = run_verify(args.cls, quick=args.quick, corrupt_c_omega=args.corrupt_c_omega)
    _emit(result, args.out)
    for line in result["summary"]:
        print(line, file=sys.stderr)
    return EXIT_PASS if result["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subcrit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_class(q):
        q.add_argument("--class", dest="cls", required=True, help="graph class: trees or outerplanar")
        q.add_argument("--out", help="write the JSON report here instead of stdout")

    q = sub.add_parser("constants", help="singularity and scaling constants")
    add_class(q)
    q.add_argument("--order", type=int, default=DEFAULT_ORDER)
    q.set_defaults(func=cmd_constants)

    q = sub.add_parser("count", help="series coefficients")
    add_class(q)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--mode", choices=["rational", "float"], default="rational")
    q.set_defaults(func=cmd_count)

    q = sub.add_parser("sample", help="random graphs as JSON edge lists")
    add_class(q)
    q.add_argument("--size", type=int, required=True)
    kind = q.add_mutually_exclusive_group()
    kind.add_argument("--rooted", action="store_true")
    kind.add_argument("--unrooted", dest="rooted", action="store_false")
    q.add_argument("--method", choices=["decomposition", "orbit-rejection"], default="decomposition")
    q.add_argument("--window", type=float, default=0.0, help="accept sizes in [n(1-w), n(1+w)]")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--count", type=int, default=1)
    q.add_argument("--format", choices=["json", "graph6"], default="json")
    q.set_defaults(func=cmd_sample)

    q = sub.add_parser("experiment", help="limit-theorem statistics")
    q.add_argument("name", choices=["rayleigh", "diameter", "bs-census", "fragments"])
    add_class(q)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--samples", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--k", type=int, default=1, help="census radius")
    q.add_argument("--window", type=float, default=ex.DEFAULT_WINDOW)
    q.add_argument("--method", choices=["decomposition", "orbit-rejection"], default="decomposition")
    q.set_defaults(func=cmd_experiment)

    q = sub.add_parser("verify", help="acceptance battery for one class")
    add_class(q)
    q.add_argument("--quick", action="store_true", help="skip the sampling criteria")
    q.add_argument("--corrupt-c-omega", type=float, default=1.0, help="negative control: scale c_omega")
    q.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, UnsupportedFeature) as exc:
        print(f"subcrit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, DomainError) as exc:
        print(f"subcrit: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BudgetExhausted as exc:
        print(f"subcrit: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
