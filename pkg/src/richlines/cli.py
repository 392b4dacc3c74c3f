"""Command-line front end wiring construction, verification, and experiments.

Exit codes: 0 on success, 1 on usage or input errors, 2 when a
theorem-backed runtime assertion fails (an implementation bug, never a
property of the input).  All file outputs are written atomically and
identical configurations produce byte-identical outputs; randomized
experiment generators are fully determined by --seed.
"""

from __future__ import annotations

import argparse
import multiprocessing
import os
import random
import sys
from fractions import Fraction

from . import caps as caps_mod
from .affine import AffineMap, general_position_check
from .construct import (
    FolnerParams,
    attach_modulus,
    folner_grid,
    folner_rate,
    klawe_select_lines,
    klawe_slopes,
    prime_params,
)
from .errors import InvariantViolation, RichlinesError
from .grid import GroundSet, image_deficiency, richness
from .growth import bsg_pipeline, ruzsa_check, triple_product
from .io import (
    canonical_json,
    csv_text,
    read_ground_set,
    read_lines,
    write_ground_set,
    write_lines,
    write_text_atomic,
)
from .oracle import rlgp_exact, sym_fp_oracle
from .product_thm import asym_experiment, dichotomy_check, expander_check
from .scalar import RationalField, parse_fraction, prime_field
from .symset import sym_bound_report, sym_set


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise UsageError(message)


def _fraction(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except RichlinesError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _field_for(p: int | None):
    return RationalField if p is None else prime_field(p)


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        write_text_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _apply_caps(args) -> None:
    if getattr(args, "unsafe_caps", False):
        caps_mod.DEFAULT = caps_mod.DEFAULT.unlimited()


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------


def cmd_construct_folner(args) -> int:
    if not args.out:
        raise UsageError("construct folner writes the grid to --out")
    params = FolnerParams(args.N, args.eps)
    ground, lines = folner_grid(params)
    write_ground_set(args.out, ground)
    if args.lines_out:
        write_lines(args.lines_out, lines)
    summary = {
        "n": params.n,
        "eps": str(params.eps),
        "ground_size": len(ground),
        "line_count": len(lines),
        "escape_counts": [image_deficiency(line, ground) for line in lines],
        "escape_budget": str(2 * params.eps * len(ground)),
        "general_position": True,
    }
    if args.alpha is not None:
        summary["rate"] = folner_rate(params, args.alpha)
    sys.stdout.write(canonical_json(summary))
    return 0


def cmd_construct_klawe(args) -> int:
    if not args.out:
        raise UsageError("construct klawe writes the line family to --out")
    params, estimates = prime_params(args.x)
    if args.p is not None:
        params = attach_modulus(params, args.p)
    slopes = klawe_slopes(list(params.primes), params.s)
    lines = klawe_select_lines(slopes, args.bmax)
    write_lines(args.out, lines)
    summary = {
        "x": args.x,
        "primes": list(params.primes),
        "k": params.k,
        "q": params.q,
        "phi_q": params.phi_q,
        "s": params.s,
        "delta": str(params.delta),
        "length": str(params.length),
        "condition_ok": params.condition_ok,
        "p": params.p,
        "cofactor": None if params.cofactor is None else str(params.cofactor),
        "remainder": None if params.remainder is None else str(params.remainder),
        "slope_count": len(slopes),
        "line_count": len(lines),
        "general_position": not general_position_check(lines),
        "estimates": estimates.to_json(),
    }
    sys.stdout.write(canonical_json(summary))
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

_POOL_GROUND: GroundSet | None = None


def _pool_init(blob: dict) -> None:
    global _POOL_GROUND
    _POOL_GROUND = GroundSet.from_json(blob)


def _pool_line(entry: dict):
    line = AffineMap.from_json(entry, _POOL_GROUND.field)
    return richness(line, _POOL_GROUND)


def cmd_verify(args) -> int:
    ground = read_ground_set(args.grid)
    lines = read_lines(args.lines, ground.field)
    jobs = args.jobs or os.cpu_count() or 1
    if jobs > 1 and len(lines) > 1:
        blob = ground.to_json()
        with multiprocessing.Pool(jobs, initializer=_pool_init, initargs=(blob,)) as pool:
            counts = pool.map(_pool_line, [g.to_json() for g in lines])
    else:
        counts = [richness(g, ground) for g in lines]
    size = len(ground)
    rows = []
    for line, count in zip(lines, counts):
        rows.append(
            (
                line.a.render(),
                line.b.render(),
                count,
                size - count,
                int(Fraction(count) >= args.alpha * size),
            )
        )
    _emit(args, csv_text(("a", "b", "richness", "deficiency", "alpha_rich"), rows))
    return 0


# ---------------------------------------------------------------------------
# symmetry sets
# ---------------------------------------------------------------------------


def cmd_sym(args) -> int:
    ground = read_ground_set(args.grid)
    if args.report == "csv":
        sym = sym_set(ground, args.alpha)
        _emit(args, csv_text(("a", "b", "richness"), sym.csv_rows()))
    else:
        sym = sym_set(ground, args.alpha)
        bounds = sym_bound_report(ground, args.alpha, sym=sym)
        payload = {
            "bounds": bounds.to_json(),
            "entries": [
                {"a": a, "b": b, "richness": count} for a, b, count in sym.csv_rows()
            ],
        }
        _emit(args, canonical_json(payload))
    return 0


def cmd_oracle_symfp(args) -> int:
    ground = read_ground_set(args.grid)
    sym = sym_fp_oracle(ground, args.alpha)
    _emit(args, csv_text(("a", "b", "richness"), sym.csv_rows()))
    return 0


def cmd_oracle_rlgp(args) -> int:
    ground = read_ground_set(args.grid)
    result = rlgp_exact(ground, args.alpha)
    payload = {
        "value": result.value,
        "candidate_count": result.candidate_count,
        "witness": [g.to_json() for g in result.witness],
    }
    _emit(args, canonical_json(payload))
    return 0


# ---------------------------------------------------------------------------
# growth experiments
# ---------------------------------------------------------------------------


def cmd_bsg(args) -> int:
    ground = read_ground_set(args.grid)
    lines = read_lines(args.lines, ground.field)
    report = bsg_pipeline(lines, ground, args.alpha, args.J)
    _emit(args, canonical_json(report.to_json()))
    return 0


def cmd_growth_triple(args) -> int:
    field = _field_for(args.p)
    lines = read_lines(args.lines, field)
    cube, ratio = triple_product(lines)
    _emit(args, canonical_json({"cube_size": len(cube), "tripling": str(ratio)}))
    return 0


def cmd_growth_dichotomy(args) -> int:
    field = _field_for(args.p)
    lines = read_lines(args.lines, field)
    report = dichotomy_check(lines)
    _emit(args, canonical_json(report.to_json()))
    return 0


def cmd_growth_ruzsa(args) -> int:
    field = prime_field(args.p)
    rng = random.Random(args.seed)
    violations = []
    for trial in range(args.trials):
        families = []
        for _ in range(3):
            count = rng.randint(1, args.size)
            families.append(
                [
                    AffineMap.of(field, rng.randint(1, args.p - 1), rng.randint(0, args.p - 1))
                    for _ in range(count)
                ]
            )
        result = ruzsa_check(*families)
        if not result.holds:
            violations.append(trial)
    payload = {
        "p": args.p,
        "size": args.size,
        "trials": args.trials,
        "seed": args.seed,
        "all_hold": not violations,
        "violations": violations,
    }
    _emit(args, canonical_json(payload))
    if violations:
        raise InvariantViolation(f"triangle inequality failed on trials {violations}")
    return 0


def cmd_growth_expander(args) -> int:
    a = read_ground_set(args.A)
    b = read_ground_set(args.B)
    c = read_ground_set(args.C)
    _emit(args, canonical_json(expander_check(a, b, c).to_json()))
    return 0


def cmd_sumprod(args) -> int:
    a = read_ground_set(args.A)
    b = read_ground_set(args.B)
    c = read_ground_set(args.C)
    report = asym_experiment(
        a, b, c, steps=args.J, k_parameter=args.K, run_pipeline=args.run_bsg
    )
    _emit(args, canonical_json(report.to_json()))
    return 0


def cmd_primes(args) -> int:
    params, estimates = prime_params(args.x)
    if args.p is not None:
        params = attach_modulus(params, args.p)
    payload = {
        "primes": list(params.primes),
        "k": params.k,
        "q": params.q,
        "phi_q": params.phi_q,
        "s": params.s,
        "delta": str(params.delta),
        "length": str(params.length),
        "condition_ok": params.condition_ok,
        "p": params.p,
        "cofactor": None if params.cofactor is None else str(params.cofactor),
        "remainder": None if params.remainder is None else str(params.remainder),
        "estimates": estimates.to_json(),
    }
    _emit(args, canonical_json(payload))
    return 0


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    shared = _Parser(add_help=False)
    shared.add_argument("--unsafe-caps", action="store_true", help="lift every size cap")
    shared.add_argument("--out", help="output path (default: stdout)")

    parser = _Parser(prog="richlines", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    construct = sub.add_parser("construct", help="build grids and line families")
    construct_sub = construct.add_subparsers(dest="variant", required=True)

    folner = construct_sub.add_parser("folner", parents=[shared])
    folner.add_argument("--N", type=int, required=True)
    folner.add_argument("--eps", type=_fraction, required=True)
    folner.add_argument("--lines-out", dest="lines_out")
    folner.add_argument("--alpha", type=_fraction, help="include a density rate report")
    folner.set_defaults(func=cmd_construct_folner)

    klawe = construct_sub.add_parser("klawe", parents=[shared])
    klawe.add_argument("--x", type=int, required=True)
    klawe.add_argument("--bmax", type=int, required=True)
    klawe.add_argument("--p", type=int, help="attach a working prime modulus")
    klawe.set_defaults(func=cmd_construct_klawe)

    verify = sub.add_parser("verify", parents=[shared], help="per-line richness CSV")
    verify.add_argument("--grid", required=True)
    verify.add_argument("--lines", required=True)
    verify.add_argument("--alpha", type=_fraction, required=True)
    verify.add_argument("--jobs", type=int, help="worker pool degree")
    verify.set_defaults(func=cmd_verify)

    sym = sub.add_parser("sym", parents=[shared], help="enumerate a symmetry set")
    sym.add_argument("--grid", required=True)
    sym.add_argument("--alpha", type=_fraction, required=True)
    sym.add_argument("--report", choices=("csv", "json"), default="csv")
    sym.set_defaults(func=cmd_sym)

    bsg = sub.add_parser("bsg", parents=[shared], help="run the structure pipeline")
    bsg.add_argument("--grid", required=True)
    bsg.add_argument("--lines", required=True)
    bsg.add_argument("--alpha", type=_fraction, required=True)
    bsg.add_argument("--J", type=int, required=True)
    bsg.set_defaults(func=cmd_bsg)

    growth = sub.add_parser("growth", help="product growth measurements")
    growth_sub = growth.add_subparsers(dest="variant", required=True)

    triple = growth_sub.add_parser("triple", parents=[shared])
    triple.add_argument("--lines", required=True)
    triple.add_argument("--p", type=int)
    triple.set_defaults(func=cmd_growth_triple)

    dichotomy = growth_sub.add_parser("dichotomy", parents=[shared])
    dichotomy.add_argument("--lines", required=True)
    dichotomy.add_argument("--p", type=int)
    dichotomy.set_defaults(func=cmd_growth_dichotomy)

    ruzsa = growth_sub.add_parser("ruzsa", parents=[shared])
    ruzsa.add_argument("--p", type=int, default=101)
    ruzsa.add_argument("--size", type=int, default=10)
    ruzsa.add_argument("--trials", type=int, default=200)
    ruzsa.add_argument("--seed", type=int, default=0)
    ruzsa.set_defaults(func=cmd_growth_ruzsa)

    expander = growth_sub.add_parser("expander", parents=[shared])
    expander.add_argument("--A", required=True)
    expander.add_argument("--B", required=True)
    expander.add_argument("--C", required=True)
    expander.set_defaults(func=cmd_growth_expander)

    sumprod = sub.add_parser("sumprod", parents=[shared], help="sum-product dichotomy")
    sumprod.add_argument("--A", required=True)
    sumprod.add_argument("--B", required=True)
    sumprod.add_argument("--C", required=True)
    sumprod.add_argument("--J", type=int, required=True)
    sumprod.add_argument("--K", type=_fraction, required=True)
    sumprod.add_argument("--run-bsg", dest="run_bsg", action="store_true")
    sumprod.set_defaults(func=cmd_sumprod)

    oracle = sub.add_parser("oracle", help="brute-force reference computations")
    oracle_sub = oracle.add_subparsers(dest="variant", required=True)

    rlgp = oracle_sub.add_parser("rlgp", parents=[shared])
    rlgp.add_argument("--grid", required=True)
    rlgp.add_argument("--alpha", type=_fraction, required=True)
    rlgp.set_defaults(func=cmd_oracle_rlgp)

    symfp = oracle_sub.add_parser("symfp", parents=[shared])
    symfp.add_argument("--grid", required=True)
    symfp.add_argument("--alpha", type=_fraction, required=True)
    symfp.set_defaults(func=cmd_oracle_symfp)

    primes = sub.add_parser("primes", parents=[shared], help="prime-product planner")
    primes.add_argument("--x", type=int, required=True)
    primes.add_argument("--p", type=int, help="attach a working prime modulus")
    primes.set_defaults(func=cmd_primes)

    return parser


def main(argv=None) -> int:
    # planner lengths run to tens of thousands of digits; lift the
    # interpreter's int-to-str guard so reports can render them
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(2_000_000)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        _apply_caps(args)
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (RichlinesError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
