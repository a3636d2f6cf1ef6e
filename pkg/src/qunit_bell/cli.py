"""``qunit-bell`` command line front end.

Exit codes: 0 success, 2 bad arguments, 3 numerical self-check failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .bellscan import FAMILIES, bell_max, bell_value_general, classical_limit_scan
from .correlator import NumericalGuardError, correlation, correlation_poly, distinct_correlations, fingerprint
from .parityobs import canonicalize, identity_overlap, mask_from_integer, tensor_overlap
from .spinrep import SpinLabel, wigner_d_squared
from .surveyor import SampleSpec, emit, format_csv, sample_survey, survey

EXIT_BAD_ARGS = 2
EXIT_GUARD = 3


def _spin_arg(text):
    try:
        return SpinLabel.parse(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid spin {text!r}: {exc}")


def _threads_arg(text):
    if text == "auto":
        return os.cpu_count() or 1
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("threads must be >= 1")
    return n


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--spin", type=_spin_arg, help='spin s, e.g. "3/2" or "2"')
    g.add_argument("--two-s", type=int, help="2s as an integer")
    p.add_argument("--grid", type=int, default=4096, help="angle grid points on (0, pi]")
    p.add_argument("--tol", type=float, default=1e-9, help="golden-section tolerance (rad)")
    p.add_argument("--threads", type=_threads_arg, default=1, help="worker threads or 'auto'")
    p.add_argument("--seed", type=int, default=0, help="seed for random mask sampling")
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="qunit-bell",
        description="Bell violations of spin-s singlets with parity-bit observables.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dmat", parents=[common], help="squared Wigner d table")
    p.add_argument("--theta", type=float, required=True)

    p = sub.add_parser("mask", parents=[common], help="describe a parity-bit observable")
    p.add_argument("--p", type=int, required=True, dest="P")

    p = sub.add_parser("corr", parents=[common], help="correlation function of one mask")
    p.add_argument("--p", type=int, required=True, dest="P")
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--theta", type=float)
    what.add_argument("--poly", action="store_true")
    what.add_argument("--fingerprint", action="store_true")

    sub.add_parser("dedupe", parents=[common], help="group masks by correlation function")

    p = sub.add_parser("max", parents=[common], help="maximal Bell value of one mask")
    p.add_argument("--p", type=int, required=True, dest="P")
    p.add_argument("--geometry", choices=("planar", "free"), default="planar")
    p.add_argument("--angles", type=_float_list,
                   help="theta_ab,theta_ab',theta_a'b,theta_a'b' for --geometry free")

    p = sub.add_parser("survey", parents=[common], help="exhaustive or sampled sweep")
    p.add_argument("--sample", type=int, default=None,
                   help="random masks to draw (switches to sampled mode)")
    p.add_argument("--include", type=_int_list, default=[], help="explicit P list (sampled mode)")

    p = sub.add_parser("classical", parents=[common], help="B_max of a mask family vs N")
    p.add_argument("--family", choices=FAMILIES, default="near-identity")
    p.add_argument("--two-s-list", type=_int_list, required=True, dest="two_s_list")
    return parser


def _spin(args) -> SpinLabel:
    if args.spin is not None:
        return args.spin
    if args.two_s is not None:
        return SpinLabel(args.two_s)
    raise ValueError("--spin or --two-s is required")


def _label(x2: int) -> str:
    return f"{x2 // 2:+d}" if x2 % 2 == 0 else f"{x2:+d}/2"


def _dmat(args):
    spin = _spin(args)
    table = wigner_d_squared(spin, args.theta)
    # rows and columns from +s down to -s
    sq = table.sq[::-1, ::-1]
    labels = [_label(spin.two_s - 2 * i) for i in range(spin.N)]
    if args.format == "json":
        return json.dumps({"spin": str(spin), "theta": args.theta, "m": labels,
                           "rows": sq.tolist()}, indent=2)
    lines = [",".join(["m'"] + labels)]
    lines += [",".join([lab] + [repr(float(x)) for x in row]) for lab, row in zip(labels, sq)]
    return "\n".join(lines)


def _mask(args):
    spin = _spin(args)
    mask = mask_from_integer(spin, args.P)
    out = mask.to_dict()
    out["trace"] = identity_overlap(mask)
    out["canonical_P"] = None if mask.is_trivial else canonicalize(mask).bits
    out["tensor_overlap"] = {
        str(k): tensor_overlap(mask, k) for k in range(1, min(spin.two_s, 6) + 1)
    }
    return json.dumps(out, indent=2)


def _corr(args):
    spin = _spin(args)
    out = {"spin": str(spin), "P": args.P}
    if args.theta is not None:
        out.update(theta=args.theta, C=correlation(spin, args.P, args.theta))
    elif args.poly:
        poly = correlation_poly(spin, args.P)
        out.update(coeffs=poly.coeffs.tolist(), expr=str(poly))
    else:
        out["fingerprint"] = fingerprint(spin, args.P).values.tolist()
    return json.dumps(out, indent=2)


def _dedupe(args):
    groups = distinct_correlations(_spin(args))
    return json.dumps({"groups": [[m.bits for m in g] for g in groups],
                       "count": len(groups)})


def _max(args):
    spin = _spin(args)
    if args.geometry == "free":
        if not args.angles or len(args.angles) != 4:
            raise ValueError("--geometry free needs --angles with four values")
        b = bell_value_general(spin, args.P, *args.angles)
        return json.dumps({"spin": str(spin), "P": args.P, "angles": args.angles, "B": b,
                           "violates": b > 2}, indent=2)
    return json.dumps(bell_max(spin, args.P, args.grid, args.tol).to_dict(), indent=2)


def _survey(args):
    spin = _spin(args)
    if args.sample is not None or args.include:
        spec = SampleSpec(count=args.sample or 0, seed=args.seed, include=args.include)
        report = sample_survey(spin, spec, args.grid, args.tol, threads=args.threads)
    else:
        report = survey(spin, args.grid, args.tol, threads=args.threads)
    if args.out:
        emit(report, args.out, args.format)
        t = report.totals
        return (f"spin {spin}: {t['evaluated']} masks, {t['distinct']} distinct, "
                f"B_max in [{t['min_b_max']:.4f}, {t['max_b_max']:.4f}] -> {args.out}")
    if args.format == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True)
    return format_csv(report).rstrip("\n")


def _classical(args):
    rows = classical_limit_scan(args.family, [SpinLabel(t) for t in args.two_s_list],
                                args.grid, args.tol)
    if args.format == "csv":
        lines = ["N,two_s,P,theta_star,b_max,violates"]
        lines += [f"{N},{r.mask.spin.two_s},{r.mask.bits},{r.theta_star!r},{r.b_max!r},"
                  f"{str(r.violates).lower()}" for N, r in rows]
        return "\n".join(lines)
    return json.dumps({"family": args.family,
                       "rows": [dict(N=N, **r.to_dict()) for N, r in rows]}, indent=2)


COMMANDS = {
    "dmat": _dmat, "mask": _mask, "corr": _corr, "dedupe": _dedupe,
    "max": _max, "survey": _survey, "classical": _classical,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = COMMANDS[args.command](args)
    except NumericalGuardError as exc:
        print(f"qunit-bell: numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, TypeError) as exc:
        print(f"qunit-bell: error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    if args.out and args.command != "survey":
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
