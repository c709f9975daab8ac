"""frobkit command line.

Every verb reads a JSON input, runs one engine operation and prints a JSON
report.  Exit codes: 0 success or pass, 1 mathematical obstruction or failed
check (the report says why), 2 bad input.
"""
import argparse
import json
import random
import sys
from fractions import Fraction

from . import errors as E
from .io import dumps, field_from_name, isocrystal_from_json, isocrystal_to_json, load_json, matrix_to_json

OBSTRUCTIONS = (E.Obstructed, E.NegativeSlope, E.SlopeAboveOne, E.SlopeZeroNotSimple,
                E.CharPolyNotRational, E.EigenvalueNotInK, E.NotIsomorphicToTwist,
                E.BoundViolation, E.NotAntisymmetricSlopes, E.NormNotOne, E.EndTooBig)


class Outcome:
    def __init__(self, report, code=0):
        self.report = report
        self.code = code


def _load_object(args):
    return isocrystal_from_json(load_json(args.input), args.precision)


def _target(args, M):
    if not args.to:
        raise ValueError("--to FIELD is required")
    return field_from_name(args.to, M.ring.precision, M.ring.p)


def _slopes_report(M):
    from .isocrystal import char_poly
    from .slopes import newton_slopes, slope_bounds_check
    P = char_poly(M)
    checks = slope_bounds_check(P)
    return {"slopes": newton_slopes(P).to_json(), "checks": checks["checks"]}


def cmd_slopes(args):
    return Outcome(_slopes_report(_load_object(args)))


def cmd_charpoly(args):
    from .isocrystal import char_poly
    M = _load_object(args)
    return Outcome({"charpoly": char_poly(M).to_json(), "ring": M.ring.describe()})


def cmd_decompose(args):
    from .slopes import isoclinic_decompose
    M = _load_object(args)
    parts = isoclinic_decompose(M)
    return Outcome({"summands": [{"slope": str(s.slope), "rank": s.obj.rank,
                                  "object": isocrystal_to_json(s.obj),
                                  "inclusion": matrix_to_json(s.inclusion)} for s in parts]})


def cmd_dm(args):
    from .slopes import dm_witness
    M = _load_object(args)
    w = dm_witness(M, args.budget)
    return Outcome({"residue_degree": w.R, "blocks": [str(b) for b in w.blocks],
                    "basis": matrix_to_json(w.basis),
                    "standard_form_verified": all(
                        _equal(a, b) for a, b in zip(w.standard.S, w.base_changed.S))})


def _equal(A, B):
    from .linalg import matrices_equal
    return matrices_equal(A, B)


def cmd_descend(args, rng):
    from .descent import descend
    M = _load_object(args)
    K = _target(args, M)
    res = descend(M, K, rng)
    report = res.to_json()
    report["target"] = str(K)
    return Outcome(report, 0 if report["certificate_verified"] else 1)


def cmd_twist(args):
    from .isocrystal import tate_twist
    M = _load_object(args)
    if args.by is None:
        raise ValueError("--by W is required")
    N, info = tate_twist(M, Fraction(args.by))
    out = {"object": isocrystal_to_json(N), "info": info}
    out.update(_slopes_report(N))
    return Outcome(out)


def cmd_twist_plan(args):
    from .descent import twisted_descent_plan
    if args.point_slopes is None:
        raise ValueError("--point-slopes is required")
    p, d = args.p, args.d
    if args.input:
        data = load_json(args.input)
        p = data.get("p", p)
        d = data.get("d", d)
    if p is None:
        raise ValueError("--p is required without an input file")
    slopes = [Fraction(s.strip()) for s in args.point_slopes.split(",")]
    plan = twisted_descent_plan(slopes, int(p), int(d or 1), args.coeff or "L", args.det)
    return Outcome(plan.to_json(), 0 if plan.consistent else 1)


def cmd_cocycle(args):
    from .cocycle import GaloisAction, compute_cocycle, cyclic_class, verify_cocycle
    M = _load_object(args)
    L0 = _target(args, M)
    action = GaloisAction(M.L, L0)
    xi = compute_cocycle(M, action)
    cls = cyclic_class(xi)
    report = {"group_order": action.n, "cocycle": xi.to_json(), "verified": verify_cocycle(xi),
              "class": cls.to_json()}
    return Outcome(report, 0 if cls.trivial else 1)


def cmd_lattice(args):
    from .dieudonne import katz_lattice, verify_dieudonne
    M = _load_object(args)
    D = katz_lattice(M, args.mode)
    check = verify_dieudonne(D)
    out = D.to_json()
    out["verification"] = check
    return Outcome(out, 0 if check["pass"] else 1)


def cmd_classify(args):
    from .dieudonne import classify_point
    M = _load_object(args)
    out = classify_point(M, args.weight)
    return Outcome(out, 0 if out["classification"] != "invalid" else 1)


def _load_dataset(args):
    from .frobdata import dataset_from_json
    return dataset_from_json(load_json(args.input))


def cmd_lint(args):
    from .frobdata import lint
    report = lint(_load_dataset(args))
    return Outcome(report, 0 if report["pass"] else 1)


def cmd_finmon(args):
    from .frobdata import finite_monodromy_detect, theoremF_check
    ds = _load_dataset(args)
    if args.rank2_check:
        report = theoremF_check(ds)
        return Outcome(report, 0 if report["pass"] else 1)
    report = finite_monodromy_detect(ds)
    return Outcome(report, 0 if report["verdict"] == "finite" else 1)


VERBS = {
    "slopes": (cmd_slopes, "slopes and slope-bound checks of an isocrystal"),
    "charpoly": (cmd_charpoly, "characteristic polynomial of F^d"),
    "decompose": (cmd_decompose, "isoclinic decomposition"),
    "dm": (cmd_dm, "Dieudonne-Manin standard form witness"),
    "descend": (cmd_descend, "descend to a smaller coefficient field"),
    "twist": (cmd_twist, "fractional Tate twist"),
    "twist-plan": (cmd_twist_plan, "twisted descent plan for a rank-2 point"),
    "cocycle": (cmd_cocycle, "Galois cocycle and its cyclic class"),
    "lattice": (cmd_lattice, "F-stable lattice / Dieudonne module"),
    "classify": (cmd_classify, "ordinary / supersingular classification"),
    "lint": (cmd_lint, "lint a Frobenius dataset"),
    "finmon": (cmd_finmon, "finite monodromy detection on a dataset"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="frobkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb, (_, help_text) in VERBS.items():
        sp = sub.add_parser(verb, help=help_text)
        sp.add_argument("input", nargs="?" if verb == "twist-plan" else None)
        sp.add_argument("--precision", type=int, help="p-adic digits (default FROBKIT_PRECISION or 32)")
        sp.add_argument("-o", "--output", help="write the report here instead of stdout")
        sp.add_argument("--seed", type=int, help="try seeded random candidates before the fixed enumeration")
        if verb in ("descend", "cocycle"):
            sp.add_argument("--to", help="target coefficient field, e.g. Qp, Qp2, 'Qp(p^(1/2))'")
        if verb == "dm":
            sp.add_argument("--budget", type=int, help="largest residue degree to search")
        if verb == "twist":
            sp.add_argument("--by", help="twist weight w (slopes move by -w)")
        if verb == "twist-plan":
            sp.add_argument("--point-slopes", help="comma-separated slopes, e.g. '-1/2,1/2'")
            sp.add_argument("--p", type=int)
            sp.add_argument("--d", type=int, default=1)
            sp.add_argument("--det", choices=["tate", "trivial"])
            sp.add_argument("--coeff", help="target coefficient field (Qp enables the forcing checks)")
        if verb == "lattice":
            sp.add_argument("--mode", choices=["dieudonne", "crystal"], default="dieudonne")
        if verb == "classify":
            sp.add_argument("--weight", type=int, default=1)
        if verb == "finmon":
            sp.add_argument("--rank2-check", action="store_true",
                            help="run the rank-2 isoclinic dichotomy before the root-of-unity test")
    return parser


def run(argv):
    """(exit code, report dict)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (0 if exc.code == 0 else 2), None, None
    fn = VERBS[args.verb][0]
    rng = random.Random(args.seed) if args.seed is not None else None
    try:
        outcome = fn(args, rng) if args.verb == "descend" else fn(args)
    except OBSTRUCTIONS as exc:
        report = {"outcome": "obstructed", "error": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "data", None):
            report["data"] = exc.data
        outcome = Outcome(report, 1)
    except (E.FrobkitError, ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        outcome = Outcome({"outcome": "input error", "error": type(exc).__name__, "message": str(exc)}, 2)
    if args.seed is not None:
        outcome.report["seed"] = args.seed
    outcome.report = {"verb": args.verb, **outcome.report}
    return outcome.code, outcome.report, args.output


def main(argv=None):
    code, report, out = run(sys.argv[1:] if argv is None else argv)
    if report is None:
        return code
    text = dumps(report) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == 2:
        sys.stderr.write(f"frobkit: {report['message']}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
