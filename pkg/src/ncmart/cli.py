"""Command line: ``ncmart gen | kcurve | decompose | check | suite | report``.

Exit status is 0 on success, 1 when an asserted check fails and 2 on usage
or input errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import config
from .algebra import AlgebraError
from .jones import HardyCouple, jones_decompose, k_curve
from .serialization import dumps, instance_from_json, instance_to_json
from .symspaces import Lp, OrliczFunction, space_from_json
from .verify import (CHECKS, FILTRATIONS, Instance, InstanceSpec, SuiteConfig, generate_instance,
                     report_csv, run_check, run_suite, summary_table)


class UsageError(Exception):
    pass


def parse_space(text):
    """A space from JSON or shorthand: ``lp:1``, ``lorentz:2:4``, ``orlicz:two_power:1:2``."""
    if text is None:
        return None
    text = text.strip()
    if text.startswith("{"):
        return space_from_json(json.loads(text))
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind == "lp" and len(parts) == 2:
            return space_from_json({"space": "lp", "p": parts[1]})
        if kind == "lorentz" and len(parts) == 3:
            return space_from_json({"space": "lorentz", "p": parts[1], "q": parts[2]})
        if kind == "orlicz" and len(parts) >= 3:
            phi = {"family": parts[1], "p": float(parts[2])}
            if len(parts) > 3:
                phi["q"] = float(parts[3])
            return space_from_json({"space": "orlicz", "phi": phi})
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad space {text!r}: {exc}") from None
    raise UsageError(f"unrecognized space {text!r}")


def parse_phi(text):
    if text is None:
        return None
    parts = text.split(":")
    try:
        if len(parts) == 2:
            return OrliczFunction(parts[0], float(parts[1]))
        if len(parts) == 3:
            return OrliczFunction(parts[0], float(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise UsageError(f"bad Orlicz function {text!r}: {exc}") from None
    raise UsageError(f"unrecognized Orlicz function {text!r}")


def _read(path):
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def load_instance(path):
    try:
        obj = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"instance is not valid JSON: {exc}") from None
    filtration, x, meta = instance_from_json(obj)
    if meta and "spec" in meta:
        spec = InstanceSpec.from_json(meta["spec"])
    else:
        A = filtration.algebra
        nb = len(A.blocks)
        spec = InstanceSpec(dim=A.total_dim, levels=min(filtration.levels, 8),
                            mode="dyadic" if filtration.kind == "averaging" else "noncommutative",
                            filtration="tensor" if filtration.kind == "tensor" else "random",
                            blocks=nb if A.total_dim % nb == 0 else 1)
    return Instance(spec, filtration, x)


def cmd_gen(args):
    spec = InstanceSpec(dim=args.dim, levels=args.levels,
                        mode="dyadic" if args.mode == "dyadic" else "noncommutative",
                        filtration=args.filtration, blocks=args.blocks, weighted=args.weighted,
                        rank=args.rank, seed=args.seed)
    inst = generate_instance(spec)
    _write(args.out, dumps(instance_to_json(inst.filtration, inst.terminal,
                                            {"spec": spec.to_json()})))
    return 0


def cmd_kcurve(args):
    inst = load_instance(args.input)
    if not (0 < args.tmin < args.tmax):
        raise UsageError("need 0 < tmin < tmax")
    if args.points < 2:
        raise UsageError("need at least two points")
    grid = np.geomspace(args.tmin, args.tmax, args.points)
    couple = HardyCouple(parse_space(args.space) or Lp(args.p), args.endpoint)
    curve = k_curve(inst.square_object(args.kind), couple, grid=grid, eps=args.epsilon,
                    square_kind=args.kind)
    _write(args.out, curve.to_csv())
    return 0


def cmd_decompose(args):
    inst = load_instance(args.input)
    dec = jones_decompose(inst.square_object(args.kind), args.t, args.epsilon, args.kind,
                          lam=args.lam)
    doc = dec.to_json()
    doc["certificates"] = dec.certificates(args.cert_rtol)
    doc["all_certified"] = all(doc["certificates"].values())
    _write(args.out, dumps(doc))
    return 0 if doc["all_certified"] else 1


def cmd_check(args):
    inst = load_instance(args.input)
    entry = {"name": args.name}
    space = parse_space(args.space)
    if space is not None:
        entry["space"] = space
    for key in ("p", "kind", "family", "theta", "gamma", "direction", "flavor"):
        val = getattr(args, key)
        if val is not None:
            entry[key] = val
    if args.phi is not None:
        entry["phi"] = parse_phi(args.phi)
    if args.name in ("k_closedness", "interpolation"):
        entry["eps"] = args.epsilon
    try:
        reps = run_check(inst, entry)
    except TypeError as exc:
        raise UsageError(f"check {args.name!r} does not take these flags: {exc}") from None
    for r in reps:
        r.tol = args.tol if r.band != (1.0, 1.0) else r.tol
    doc = {"reports": [r.to_json() for r in reps], "passed": all(r.passed for r in reps)}
    _write(args.out, dumps(doc))
    return 0 if doc["passed"] else 1


def cmd_suite(args):
    try:
        cfg = SuiteConfig.from_json(json.loads(_read(args.config)))
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from None
    report = run_suite(cfg)
    _write(args.out, dumps(report))
    if args.csv:
        _write(args.csv, report_csv(report))
    if args.out not in (None, "-"):
        sys.stderr.write(summary_table(report))
    return 0 if report["passed"] else 1


def cmd_report(args):
    try:
        report = json.loads(_read(args.input))
    except json.JSONDecodeError as exc:
        raise UsageError(f"report is not valid JSON: {exc}") from None
    if "reports" not in report:
        raise UsageError("not a report document")
    report.setdefault("passed", all(r["passed"] for r in report["reports"]))
    _write(args.out, summary_table(report))
    return 0


def _float(text):
    v = float(text)
    if math.isnan(v):
        raise argparse.ArgumentTypeError("nan is not allowed")
    return v


def build_parser():
    ap = argparse.ArgumentParser(prog="ncmart", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a seeded instance")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--dim", type=int, default=8)
    g.add_argument("--levels", type=int, default=3)
    g.add_argument("--mode", choices=("noncommutative", "dyadic"), default="noncommutative")
    g.add_argument("--filtration", choices=FILTRATIONS, default="pinching")
    g.add_argument("--blocks", type=int, default=1)
    g.add_argument("--weighted", action="store_true")
    g.add_argument("--rank", type=int, default=None)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    kinds = ("martingale", "conditioned", "adapted")
    k = sub.add_parser("kcurve", help="certified K-functional bounds as CSV")
    k.add_argument("--in", dest="input", required=True)
    k.add_argument("--p", type=_float, default=2.0)
    k.add_argument("--space", default=None, help="overrides --p, e.g. orlicz:two_power:1:2")
    k.add_argument("--endpoint", choices=("h_inf", "bmo"), default="h_inf")
    k.add_argument("--kind", choices=kinds, default="martingale")
    k.add_argument("--tmin", type=_float, default=1e-2)
    k.add_argument("--tmax", type=_float, default=1e2)
    k.add_argument("--points", type=int, default=config.TGRID_POINTS)
    k.add_argument("--epsilon", type=_float, default=config.EPSILON)
    k.add_argument("--out", default=None)
    k.set_defaults(func=cmd_kcurve)

    d = sub.add_parser("decompose", help="two-step decomposition with certificates")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--t", type=_float, required=True)
    d.add_argument("--epsilon", type=_float, default=config.EPSILON)
    d.add_argument("--kind", choices=kinds, default="martingale")
    d.add_argument("--lambda", dest="lam", type=_float, default=None)
    d.add_argument("--cert-rtol", type=_float, default=config.CERT_RTOL)
    d.add_argument("--out", default=None)
    d.set_defaults(func=cmd_decompose)

    c = sub.add_parser("check", help="run one check on an instance")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--name", choices=sorted(CHECKS), required=True)
    c.add_argument("--space", default=None)
    c.add_argument("--phi", default=None, help="Orlicz function, e.g. two_power:1:2")
    c.add_argument("--p", type=_float, default=None)
    c.add_argument("--kind", choices=kinds, default=None)
    c.add_argument("--family", choices=("power", "orlicz", "gen_lorentz", "bmo"), default=None)
    c.add_argument("--theta", type=_float, default=None)
    c.add_argument("--gamma", type=_float, default=None)
    c.add_argument("--direction", choices=("forward", "reverse"), default=None)
    c.add_argument("--flavor", choices=("norm", "phi_moment"), default=None)
    c.add_argument("--epsilon", type=_float, default=config.EPSILON)
    c.add_argument("--tol", type=_float, default=config.RATIO_TOL)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("suite", help="run a configured suite")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default=None, help="report JSON (default stdout)")
    s.add_argument("--csv", default=None, help="per-row CSV")
    s.set_defaults(func=cmd_suite)

    r = sub.add_parser("report", help="summary table of a report JSON")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_report)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except (UsageError, AlgebraError, ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"ncmart {args.command}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
