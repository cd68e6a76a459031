"""Command-line front end.

    combdiv repro example1
    combdiv check duality --samples 50 --seed 1
    combdiv divergence --measure re --kind choi --lhs t.json --rhs v.json
    combdiv quantifier --which N --comb t.json
    combdiv optimize --kind comb --measure re --lhs t.json --rhs v.json --restarts 8
    combdiv validate-comb t.json

Exit status is 0 when every check passes, 1 on a failed check and 2 on bad input.
The default seed comes from ``COMBDIV_SEED`` when set.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import io
from .channel import ChoiChannel
from .comb import ProcessComb, channel_as_comb, comb_as_channel, validate_comb
from .divergence import (
    choi_divergence,
    input_output_correlation,
    matching_classical,
    non_markovianity,
    total_correlations,
)
from .exceptions import CombError
from .optimizer import (
    OptimizerConfig,
    classical_comb_divergence,
    generalized_channel_divergence,
    generalized_comb_divergence,
)
from .scenarios import SCENARIOS, SUITES, run_scenario, run_suite

SEED_ENV = "COMBDIV_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    try:
        return int(raw) if raw else 0
    except ValueError:
        raise SystemExit(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _value_payload(v: float) -> dict:
    return {"value": v if math.isfinite(v) else "inf", "finite": math.isfinite(v)}


def _as_comb(x) -> ProcessComb:
    return channel_as_comb(x) if isinstance(x, ChoiChannel) else x


def cmd_repro(args) -> tuple[dict, bool]:
    rep = run_scenario(args.scenario, args.seed, args.jobs, args.samples)
    return rep, rep["pass"]


def cmd_check(args) -> tuple[dict, bool]:
    cfg = OptimizerConfig(restarts=args.restarts) if args.restarts else None
    rep = run_suite(args.suite, args.samples, args.seed, args.jobs, cfg)
    return rep, rep["pass"]


def cmd_divergence(args) -> tuple[dict, bool]:
    lhs, rhs = io.load(args.lhs), io.load(args.rhs)
    if isinstance(lhs, ChoiChannel) != isinstance(rhs, ChoiChannel):
        lhs, rhs = _as_comb(lhs), _as_comb(rhs)
    return {"measure": args.measure, "kind": args.kind, **_value_payload(choi_divergence(args.measure, lhs, rhs))}, True


def cmd_quantifier(args) -> tuple[dict, bool]:
    x = io.load(args.comb)
    if args.which == "M":
        if not isinstance(x, ChoiChannel):
            x = comb_as_channel(x)
        v = input_output_correlation(x)
    elif args.which == "I":
        v = total_correlations(_as_comb(x))
    else:
        v = non_markovianity(_as_comb(x))
    return {"quantifier": args.which, **_value_payload(v)}, True


def cmd_optimize(args) -> tuple[dict, bool]:
    lhs, rhs = io.load(args.lhs), io.load(args.rhs)
    cfg = OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters, seed=args.seed,
                          ancilla_dim=args.ancilla_dim, n_jobs=args.jobs)
    if args.kind == "channel":
        res = generalized_channel_divergence(args.measure, lhs, rhs, cfg)
    elif args.kind == "comb":
        res = generalized_comb_divergence(args.measure, _as_comb(lhs), _as_comb(rhs), cfg)
    else:
        measure = args.measure if args.measure == "kl" else matching_classical(args.measure)
        res = classical_comb_divergence(measure, _as_comb(lhs), _as_comb(rhs), cfg)
    out = {"kind": args.kind, "measure": str(getattr(args.measure, "value", args.measure)), **res.as_dict()}
    out["argmax"] = io.to_dict(res.argmax)
    return out, True


def cmd_validate_comb(args) -> tuple[dict, bool]:
    d = io.read_json(args.comb)
    t = io.comb_from_dict(d, validate=False)
    rep = validate_comb(t)
    return {"teeth": d.get("teeth", [[list(i), list(o)] for i, o in t.teeth]), **rep.as_dict()}, rep.passed


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help=f"random seed (default ${SEED_ENV} or 0)")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="parallel restarts (joblib n_jobs)")
    common.add_argument("--output", choices=["json", "text"], default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="combdiv", description=__doc__.split("\n")[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("repro", parents=[common], help="reproduce a named example")
    r.add_argument("scenario", choices=SCENARIOS)
    r.add_argument("--samples", type=int, default=None)
    r.set_defaults(func=cmd_repro)

    c = sub.add_parser("check", parents=[common], help="run a randomized property suite")
    c.add_argument("suite", choices=SUITES)
    c.add_argument("--samples", type=int, default=None)
    c.add_argument("--restarts", type=int, default=None, help="optimizer restarts for the sandwich suite")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("divergence", parents=[common], help="Choi divergence of two channels or combs")
    d.add_argument("--measure", choices=["re", "td"], default="re")
    d.add_argument("--kind", choices=["choi"], default="choi")
    d.add_argument("--lhs", required=True)
    d.add_argument("--rhs", required=True)
    d.set_defaults(func=cmd_divergence)

    q = sub.add_parser("quantifier", parents=[common], help="correlation quantifiers I, N or M")
    q.add_argument("--which", choices=["I", "N", "M"], required=True)
    q.add_argument("--comb", required=True, help="comb or channel JSON")
    q.set_defaults(func=cmd_quantifier)

    o = sub.add_parser("optimize", parents=[common], help="certified lower bound on a generalized divergence")
    o.add_argument("--kind", choices=["channel", "comb", "classical"], default="comb")
    o.add_argument("--measure", choices=["re", "td", "kl"], default="re")
    o.add_argument("--lhs", required=True)
    o.add_argument("--rhs", required=True)
    o.add_argument("--restarts", type=int, default=8)
    o.add_argument("--max-iters", type=int, default=30)
    o.add_argument("--ancilla-dim", type=int, default=None)
    o.set_defaults(func=cmd_optimize)

    v = sub.add_parser("validate-comb", parents=[common], help="positivity, trace and causality of a comb")
    v.add_argument("comb")
    v.set_defaults(func=cmd_validate_comb)
    return p


def _text(report: dict, indent: str = "") -> str:
    lines = []
    if "checks" in report:
        for c in report["checks"]:
            mark = "PASS" if c["pass"] else "FAIL"
            lines.append(f"{indent}{mark} {c['name']} = {c['value']} ({c['relation']} {c['expected']} "
                         f"+/- {c['tolerance']}, {c['provenance']})")
        for k, val in report.get("observations", {}).items():
            lines.append(f"{indent}{k}: {val}")
        lines.append(f"{indent}overall: {'PASS' if report['pass'] else 'FAIL'}")
        return "\n".join(lines)
    for k, val in report.items():
        if k in ("results", "argmax", "trace"):
            continue
        label = "certified lower bound" if k == "value" and "certified" in report else k
        lines.append(f"{indent}{label}: {val}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed = getattr(args, "seed", None)
    if args.seed is None:
        args.seed = _default_seed()
    args.jobs = getattr(args, "jobs", None)
    output = getattr(args, "output", "json")
    if args.command == "optimize" and args.kind != "classical" and args.measure == "kl":
        parser.error("--measure kl only applies to --kind classical")
    try:
        report, ok = args.func(args)
    except (CombError, OSError) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return 2
    print(json.dumps(report, indent=2) if output == "json" else _text(report))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
