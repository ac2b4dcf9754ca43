"""Command-line entry point: ``avmod <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys

from . import gln
from .atlas import ATLAS_NAMES, get_atlas, glue_check, rule_for
from .build import MODULE_GRAMMAR, build_module
from .expr import ParseError
from .gk import frame_from_spec, growth_exponent, growth_series
from .modules import Unknown, minimal_differentiability
from .scenarios import (ScenarioError, builtin_scenarios, dump_reports, load_scenarios, run_many,
                        select)


def _emit(args, payload, text: str) -> None:
    print(text)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(payload if isinstance(payload, str) else json.dumps(payload, indent=2, sort_keys=True))
            fh.write("\n")


def _summary(reports) -> str:
    lines = []
    for r in reports:
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.name}")
        if r.error:
            lines.append(f"      error: {r.error}")
        for c in r.checks:
            if c.status != "pass":
                for w in c.witnesses[:3]:
                    lines.append(f"      {c.kind}: {w}")
    ok = sum(r.passed for r in reports)
    lines.append(f"{ok}/{len(reports)} scenarios passed")
    return "\n".join(lines)


def cmd_verify(args) -> int:
    scns = select(builtin_scenarios(), args.filter)
    if not scns:
        print(f"no scenario matches {args.filter!r}", file=sys.stderr)
        return 2
    reports = run_many(scns, args.seed, args.samples, args.jobs)
    _emit(args, dump_reports(reports, args.timings), _summary(reports))
    return 0 if all(r.passed for r in reports) else 1


def cmd_scenario(args) -> int:
    try:
        scns = load_scenarios(args.file)
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: cannot read scenario file: {e}", file=sys.stderr)
        return 2
    reports = run_many(scns, args.seed, args.samples, args.jobs)
    _emit(args, dump_reports(reports, args.timings), _summary(reports))
    return 0 if all(r.passed for r in reports) else 1


def cmd_diff_order(args) -> int:
    M = build_module(args.module)
    got = minimal_differentiability(M, args.nmax, args.degree)
    value = str(got) if isinstance(got, Unknown) else got
    _emit(args, {"module": args.module, "nmax": args.nmax, "degree": args.degree, "order": value},
          f"{args.module}: minimal differentiability order {value}")
    return 1 if isinstance(got, Unknown) else 0


def cmd_gk(args) -> int:
    M = build_module(args.module)
    series = growth_series(M, frame_from_spec(M, args.frame), [M.basis(0)[0]], args.lmax)
    fit = growth_exponent(series.dims)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(series.to_csv())
    _emit(args, {"module": args.module, "frame": args.frame, "lmax": args.lmax, "dims": series.dims,
                 "exponent": round(fit.exponent, 4), "residual": round(fit.residual, 6)},
          f"dims: {series.dims}\nexponent: {fit.exponent:.4f} (rms residual {fit.residual:.2e})")
    return 0


def cmd_rep(args) -> int:
    rep = gln.rep_build(args.expr)
    out = {"rep": args.expr, "dim": rep.dim}
    try:
        cc = gln.central_character(rep, args.casimirs)
        out["casimirs"] = [str(c) for c in cc]
    except gln.NotScalar as e:
        out["casimirs"] = None
        out["not_scalar"] = str(e)
    try:
        out["exterior_type"] = gln.is_exterior_type(rep)
    except gln.NotScalar:
        out["exterior_type"] = None
    lines = [f"{args.expr}: dim {rep.dim}"]
    if out["casimirs"] is not None:
        lines += [f"Omega_{k + 1} = {c}" for k, c in enumerate(out["casimirs"])]
    else:
        lines.append(out["not_scalar"])
    lines.append(f"exterior type: {out['exterior_type']}")
    _emit(args, out, "\n".join(lines))
    return 0


def cmd_glue(args) -> int:
    atlas = get_atlas(args.atlas)
    rep = glue_check(atlas, rule_for(atlas, args.rule), args.bound)
    lines = [f"{e['status'].upper():4}  {e['check']}" + (f"  ({e['witness']})" if e["witness"] else "")
             for e in rep.entries]
    _emit(args, {"atlas": rep.atlas, "rule": rep.rule, "status": "pass" if rep.passed else "fail",
                 "entries": rep.entries}, "\n".join(lines))
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="also write the report as JSON")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks (default 0)")
    common.add_argument("--samples", type=int, default=64, help="samples for randomized checks (default 64)")
    common.add_argument("--jobs", type=int, default=1, help="run scenarios in this many processes")
    common.add_argument("--timings", action="store_true", help="include per-check timings in JSON reports")

    p = argparse.ArgumentParser(prog="avmod", description="Exact computer algebra for AV-modules.",
                                epilog=MODULE_GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("verify", parents=[common], help="run the built-in scenario suite")
    v.add_argument("--filter", help="only scenarios whose name contains this text or that carry this tag")
    v.set_defaults(fn=cmd_verify)

    s = sub.add_parser("scenario", parents=[common], help="run scenarios from a JSON file")
    s.add_argument("file")
    s.set_defaults(fn=cmd_scenario)

    d = sub.add_parser("diff-order", parents=[common], help="minimal differentiability order")
    d.add_argument("--module", required=True)
    d.add_argument("--nmax", type=int, default=4)
    d.add_argument("--degree", type=int, default=6)
    d.set_defaults(fn=cmd_diff_order)

    g = sub.add_parser("gk", parents=[common], help="growth series and exponent")
    g.add_argument("--module", required=True)
    g.add_argument("--frame", required=True, help="comma-separated: x, dx, jets, jets3, ...")
    g.add_argument("--lmax", type=int, default=24)
    g.add_argument("--csv", metavar="PATH", help="write the growth series as CSV")
    g.set_defaults(fn=cmd_gk)

    r = sub.add_parser("rep", parents=[common], help="Casimir scalars of a gl_n representation")
    r.add_argument("--expr", required=True)
    r.add_argument("--casimirs", type=int, default=2)
    r.set_defaults(fn=cmd_rep)

    gl = sub.add_parser("glue", parents=[common], help="check a transition rule on an atlas")
    gl.add_argument("--atlas", required=True, choices=ATLAS_NAMES)
    gl.add_argument("--rule", required=True, help="section | tensor:<rep> | det:<lam> | charged:<lam> | jet:<s>")
    gl.add_argument("--bound", type=int, default=3)
    gl.set_defaults(fn=cmd_glue)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ScenarioError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
