"""Command line front end.

Three commands: `chartable` writes a character table with class data,
`pseudomeasure` constructs and verifies an abelian pseudomeasure file, and
`check SUITE` runs one of the named property/congruence suites with a
seeded generator and writes a deterministic JSON report.

Exit codes: 0 all pass, 1 check failure, 2 input error, 3 precision
exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys

from .algebra import read_prolgroup_datum
from .context import PrecisionContext
from .errors import InputError, IwacalcError, PrecisionExhausted
from .lfunc import (DirichletCharacterDatum, interpolation_check,
                    stickelberger_lambda, write_pseudomeasure)
from .lgroup import catalog_group, read_group, write_group
from .suites import SUITES


def render_padic(residue: int, l: int, prec: int) -> str:
    """Digit string base l, lowest digit first, with precision tag."""
    digits = []
    r = residue
    for _ in range(prec):
        r, d = divmod(r, l)
        digits.append(str(d))
    return " ".join(digits) + f" (mod {l}^{prec})"


def load_group(spec: str, l: int):
    if spec.startswith("catalog:"):
        return catalog_group(spec[len("catalog:"):])
    with open(spec, "r", encoding="utf-8") as fh:
        return read_group(fh.read())


def _write_out(path, text):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_chartable(args) -> int:
    F = load_group(args.group, args.l)
    cd = F.conjugacy_classes()
    tab = F.character_table()
    out = {
        "group": F.name or args.group,
        "order": F.n,
        "classes": [{"rep": r, "size": h}
                    for r, h in zip(cd.reps, cd.sizes)],
        "degrees": list(tab.degrees()),
        "cyclo_level": tab.level,
        "table": [[list(v.coeffs) for v in ch.values]
                  for ch in tab.irreducibles],
    }
    _write_out(args.out, json.dumps(out, sort_keys=True, indent=1) + "\n")
    return 0


def cmd_pseudomeasure(args) -> int:
    ctx = PrecisionContext(args.l, args.precision, args.degree,
                           m=args.cyclo_level)
    S = []
    for tok in (args.S.split(",") if args.S else []):
        tok = tok.strip()
        if tok in ("inf", ""):
            continue
        S.append(int(tok))
    S = [p for p in S if p != args.l]
    wild = 0
    cond = args.conductor
    while cond % args.l == 0:
        cond //= args.l
        wild += 1
    if cond != 1:
        raise InputError("conductor must be a power of l")
    wild = max(wild - 1, 0)
    level = args.level or max(wild + 4, 6)
    lam = stickelberger_lambda(ctx, level=level, S=tuple(S), c=args.aux)
    chis = [DirichletCharacterDatum(ctx, t)
            for t in range(0, ctx.l - 1, 2)]
    if wild >= 1:
        chis.append(DirichletCharacterDatum(ctx, 0, 1, 1))
    annex = []
    all_ok = True
    for chi in chis:
        rep = interpolation_check(lam, chi, [1, 2, 3, 4], min_digits=1)
        all_ok = all_ok and rep.passed
        annex.extend(it.as_dict() for it in rep.items)
    text = write_pseudomeasure(lam)
    text += "# verification annex\n"
    text += "# " + json.dumps({"interpolation": annex, "passed": all_ok,
                               "unit_verdict": lam.is_unit_verdict()},
                              sort_keys=True) + "\n"
    _write_out(args.out, text)
    return 0 if all_ok else 1


def cmd_check(args) -> int:
    if args.suite not in SUITES:
        raise InputError(f"unknown suite {args.suite!r}; have "
                         f"{sorted(SUITES)}")
    import random
    ctx = PrecisionContext(args.l, args.precision, args.degree,
                           m=args.cyclo_level)
    rng = random.Random(args.seed)
    kwargs = {}
    if args.count is not None:
        kwargs["count"] = args.count
    if args.sabotage:
        kwargs["sabotage"] = True
    report = SUITES[args.suite](ctx, rng, **kwargs)
    payload = {
        "suite": args.suite,
        "config": {"l": ctx.l, "N": ctx.N, "D": ctx.D, "m": ctx.m,
                   "seed": args.seed},
        "passed": report.passed,
        "items": [it.as_dict() for it in report.items],
    }
    _write_out(args.out, json.dumps(payload, sort_keys=True, indent=1)
               + "\n")
    return 0 if report.passed else 1


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--l", type=int, default=3, help="odd prime")
    common.add_argument("--precision", type=int, default=6, metavar="N",
                        help="coefficient digits base l")
    common.add_argument("--degree", type=int, default=8, metavar="D",
                        help="series truncation degree")
    common.add_argument("--cyclo-level", type=int, default=1, metavar="m",
                        help="supported root-of-unity level l^m")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="",
                        help="output path (default stdout)")

    ap = argparse.ArgumentParser(
        prog="iwacalc",
        description="desk-scale checks for truncated Iwasawa-algebra "
                    "identities and abelian l-adic L-data")
    sub = ap.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("chartable", parents=[common],
                        help="write a character table")
    p1.add_argument("--group", required=True,
                    help="catalog:NAME or a group file path")
    p1.set_defaults(fn=cmd_chartable)

    p2 = sub.add_parser("pseudomeasure", parents=[common],
                        help="construct + verify an abelian pseudomeasure")
    p2.add_argument("--conductor", type=int, required=True,
                    help="l-power conductor bound for the annex checks")
    p2.add_argument("--S", default="", help="comma list, e.g. inf,5,11")
    p2.add_argument("--level", type=int, default=0,
                    help="construction level (default from conductor)")
    p2.add_argument("--aux", type=int, default=2,
                    help="auxiliary regularizing unit c")
    p2.set_defaults(fn=cmd_pseudomeasure)

    p3 = sub.add_parser("check", parents=[common],
                        help="run a named property suite")
    p3.add_argument("suite", help="one of " + ", ".join(sorted(SUITES)))
    p3.add_argument("--count", type=int, default=None,
                    help="randomized item count override")
    p3.add_argument("--sabotage", action="store_true",
                    help="run the designed-failure variant")
    p3.add_argument("--group", default="",
                    help="group datum (suites are catalog-based by "
                         "default)")
    p3.set_defaults(fn=cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return 3
    except IwacalcError as exc:
        print(f"check error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
