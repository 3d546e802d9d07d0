"""Command line front end.

Exit codes: 0 positive certification, 1 refutation or witness, 2 usage
error, 3 internal error. Output files go to ``--out``, defaulting to
``$QUASIPARETO_OUT`` or the current directory.
"""

from __future__ import annotations

import argparse
import csv
import difflib
import json
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import reports
from .convexity import ConvexityClass, audit_class, default_samples
from .duality import (DualPoint, converse_duality_check, is_dual_feasible, strong_duality_pipeline,
                      weak_duality_check)
from .interval import VecLU
from .kkt import KKT_TOL, MultiplierCertificate, build_kkt_system, certificate_problems, solve_kkt
from .pareto import SolutionType, falsify_on_grid, inclusion_audit, witness_rows
from .problem import FIXTURES, Problem, ProblemError, fixture_path, is_feasible, load_problem
from .scalarize import make_phi, phi_table, qw_oracle

OUT_ENV = "QUASIPARETO_OUT"
EXIT_OK, EXIT_REFUTED, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- argument helpers

def parse_point(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError as exc:
        raise UsageError(f"cannot parse point {text!r}") from exc


def parse_points(text: str) -> np.ndarray:
    """``"a,b;c,d"`` -> array of shape (k, n)."""
    pts = [parse_point(chunk) for chunk in text.split(";") if chunk.strip()]
    if not pts or len({len(p) for p in pts}) != 1:
        raise UsageError(f"cannot parse point list {text!r}")
    return np.array(pts)


def parse_box(text: str) -> list:
    vals = parse_point(text)
    if len(vals) % 2 or np.any(vals[0::2] >= vals[1::2]):
        raise UsageError(f"box {text!r} must be lo,hi pairs with lo < hi")
    return [tuple(vals[k:k + 2]) for k in range(0, len(vals), 2)]


def parse_mu(text: str) -> list:
    out = []
    for item in (text or "").split(","):
        if not item.strip():
            continue
        try:
            t, v = item.split(":")
            out.append((float(t), float(v)))
        except ValueError as exc:
            raise UsageError(f"cannot parse multiplier {item!r}; expected t:value") from exc
    return out


def resolve_problem(spec: str) -> Problem:
    path = Path(spec)
    if path.is_file():
        return load_problem(path)
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    if stem in FIXTURES:
        return load_problem(fixture_path(stem))
    raise UsageError(f"problem file {spec!r} not found")


def _problem(args) -> Problem:
    p = resolve_problem(args.problem)
    if getattr(args, "t_grid", None):
        p = p.with_t_grid(args.t_grid)
    if getattr(args, "epsilon_zero", False):
        p = p.exact_mode()
    return p


def _point_for(p: Problem, text: str) -> np.ndarray:
    x = parse_point(text)
    if x.shape[0] != p.n:
        raise UsageError(f"point has dimension {x.shape[0]}, problem has n = {p.n}")
    return x


def _box(p: Problem, text: str) -> list:
    b = parse_box(text)
    if len(b) == 1:
        b = b * p.n
    if len(b) != p.n:
        raise UsageError(f"box has {len(b)} axes, problem has n = {p.n}")
    return b


def _out_dir(args) -> Path:
    d = Path(args.out or os.environ.get(OUT_ENV) or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _emit(args, text: str):
    print(text, end="" if text.endswith("\n") else "\n")
    if args.report:
        path = _out_dir(args) / args.report
        path.write_text(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, default=lambda o: o.tolist() if hasattr(o, "tolist") else str(o))


def _check_steps(steps: int):
    if steps < 2:
        raise UsageError("--steps must be at least 2")


# ---------------------------------------------------------------- commands

def cmd_check_solution(args) -> int:
    p = _problem(args)
    x = _point_for(p, args.point)
    _check_steps(args.steps)
    extra = parse_points(args.inject) if args.inject else None
    if extra is not None and extra.shape[1] != p.n:
        raise UsageError("injected points have the wrong dimension")
    if not is_feasible(p, x):
        raise UsageError(f"point {args.point} is not feasible")
    stype = SolutionType(args.type)
    rep = falsify_on_grid(p, x, stype, _box(p, args.box), args.steps, extra_points=extra, margin=args.margin)
    lines = [f"problem {p.name}", f"type {stype.value} at {reports.fvec(x)}",
             f"status {rep.status}", f"scanned {rep.scanned} (injected {rep.extra}), feasible {rep.feasible}"]
    if rep.witness is None:
        lines.append("certified relative to the scanned points only")
        _emit(args, "\n".join(lines))
        return EXIT_OK
    refuted = inclusion_audit(p, x, rep.witness, args.margin)
    lines.append(f"witness {reports.fvec(rep.witness.x)} f {reports.fint(rep.witness.values)}")
    lines.append("refutes " + ", ".join(s.value for s in refuted))
    header, rows = witness_rows(p, [rep.witness])
    path = _out_dir(args) / (args.csv or "witness.csv")
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerows([header] + rows)
    lines.append(f"witness table {path}")
    _emit(args, "\n".join(lines))
    return EXIT_REFUTED


def cmd_kkt_certify(args) -> int:
    p = _problem(args)
    x = _point_for(p, args.point)
    if not is_feasible(p, x):
        raise UsageError(f"point {args.point} is not feasible")
    sys_ = build_kkt_system(p, x)
    if args.verify:
        try:
            cert = MultiplierCertificate.from_json(json.loads(Path(args.verify).read_text()))
        except OSError as exc:
            raise UsageError(str(exc)) from exc
        problems = certificate_problems(sys_, cert)
        _emit(args, "verification " + ("PASS" if not problems else "FAIL: " + "; ".join(problems)))
        return EXIT_OK if not problems else EXIT_REFUTED
    cert = solve_kkt(sys_, args.tol)
    path = _out_dir(args) / (args.certificate or "certificate.json")
    path.write_text(cert.dumps() + "\n")
    lines = [f"problem {p.name}", f"point {reports.fvec(x)}", f"status {cert.status}",
             f"residual {reports.fmt(cert.residual)}", f"exactness {cert.exactness.value}",
             f"enumeration {cert.enumeration} ({cert.combinations_tried} tried)",
             f"lambdaL {reports.fvec(cert.lambdaL)} lambdaU {reports.fvec(cert.lambdaU)}",
             "mu " + (", ".join(f"t={reports.fmt(t)}: {reports.fmt(v)}" for t, v in cert.mu) or "none"),
             f"certificate {path}"]
    _emit(args, "\n".join(lines))
    return EXIT_OK if cert.certified else EXIT_REFUTED


def cmd_scalarize(args) -> int:
    p = _problem(args)
    x = _point_for(p, args.point)
    _check_steps(args.steps)
    try:
        inst = make_phi(p, x)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    box = _box(p, args.box)
    res = qw_oracle(inst, box, args.steps, margin=args.margin, polish=args.polish)
    lines = [f"problem {p.name}", f"anchor {reports.fvec(x)}", f"status {res.status}",
             f"scanned {res.scanned}, feasible {res.feasible}"]
    if res.grid_min is not None:
        lines.append(f"smallest phi {reports.fmt(res.grid_min[1])} at {reports.fvec(res.grid_min[0])}")
    if res.x is not None:
        lines.append(f"phi < 0 at {reports.fvec(res.x)}: {reports.fmt(res.value)}")
    if args.csv:
        X, phi, branch = phi_table(inst, box, args.steps)
        path = _out_dir(args) / args.csv
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{j + 1}" for j in range(p.n)] + ["phi", "branch"])
            for j in range(X.shape[1]):
                w.writerow([repr(float(v)) for v in X[:, j]] + [repr(float(phi[j])), int(branch[j])])
        lines.append(f"table {path}")
    _emit(args, "\n".join(lines))
    return EXIT_OK if res.status == "CONSISTENT" else EXIT_REFUTED


def cmd_convexity(args) -> int:
    p = _problem(args)
    x = _point_for(p, args.point)
    explicit = parse_points(args.sample) if args.sample else ()
    samples = default_samples(p, _box(p, args.box), args.samples, args.seed, explicit=explicit)
    v = audit_class(p, x, ConvexityClass(args.cls), samples, jobs=args.jobs, seed=args.seed, margin=args.margin)
    out = v.to_json()
    if args.certificate:
        path = _out_dir(args) / args.certificate
        path.write_text(_dump(out) + "\n")
    lines = [f"problem {p.name}", f"class {v.cls.value} at {reports.fvec(x)}", f"status {v.status}",
             f"samples {v.samples}, systems {v.systems}, undecided {v.undecided}, enumeration {v.enumeration}"]
    if v.witness is not None:
        w = out["witness"]
        lines.append(f"witness x {reports.fvec(w['x'])}, selection {w['selection']}")
        if "nu_bounds" in w:
            b = w["nu_bounds"]
            lines.append(f"nu >= {reports.fmt(b['lower'])} ({b['from'][0]}), nu <= {reports.fmt(b['upper'])} ({b['from'][1]})")
        lines.append(f"dual value {reports.fmt(w['dual_value'])}, recheck {w['recheck']}")
    _emit(args, "\n".join(lines))
    return EXIT_OK if v.status == "SAMPLE-CONSISTENT" else EXIT_REFUTED


def _dual_point(p: Problem, args) -> DualPoint:
    y = _point_for(p, args.y)
    lam_l = parse_point(args.lambda_l)
    lam_u = parse_point(args.lambda_u)
    if len(lam_l) != p.m or len(lam_u) != p.m:
        raise UsageError(f"need {p.m} lower and {p.m} upper multipliers")
    return DualPoint(y, lam_l, lam_u, parse_mu(args.mu))


def cmd_dual_check(args) -> int:
    p = _problem(args)
    if args.mode == "strong":
        if not args.point:
            raise UsageError("dual-check strong needs --point")
        d, rep = strong_duality_pipeline(p, _point_for(p, args.point), args.tol)
        _emit(args, _dump(rep.to_json()))
        return EXIT_OK if rep.status == "PIPELINE-OK" else EXIT_REFUTED
    for name in ("y", "lambda_l", "lambda_u"):
        if getattr(args, name) is None:
            raise UsageError(f"dual-check {args.mode} needs --{name.replace('_', '-')}")
    d = _dual_point(p, args)
    if args.mode == "feasible":
        rep = is_dual_feasible(p, d, args.tol)
        _emit(args, _dump(rep.to_json()))
        return EXIT_OK if rep.feasible else EXIT_REFUTED
    if args.mode == "weak":
        if not args.x:
            raise UsageError("dual-check weak needs --x")
        mode = VecLU.PRECS if args.relation == "precs" else VecLU.PRECEQ
        v = weak_duality_check(p, _point_for(p, args.x), d, mode, margin=args.margin, seed=args.seed,
                               tol=args.tol)
        _emit(args, _dump(v.to_json()))
        return EXIT_OK if v.status == "HOLDS-CLAIM" else EXIT_REFUTED
    v = converse_duality_check(p, d, args.tol, seed=args.seed, margin=args.margin)
    _emit(args, _dump(v.to_json()))
    return EXIT_OK if v.status == "CONSISTENT" else EXIT_REFUTED


def cmd_reproduce(args) -> int:
    if args.example not in reports.REPORTS:
        raise UsageError(f"unknown example {args.example!r}; choose from {', '.join(reports.REPORT_IDS)}")
    text = reports.REPORTS[args.example](args.seed)
    path = _out_dir(args) / f"{args.example}.txt"
    path.write_text(text)
    expected = reports.expected_report(args.example)
    print(text, end="")
    if expected is None:
        print(f"no stored expected report for {args.example}", file=sys.stderr)
        return EXIT_INTERNAL
    if text == expected:
        print(f"matches stored expected report ({path})")
        return EXIT_OK
    sys.stdout.writelines(difflib.unified_diff(expected.splitlines(True), text.splitlines(True),
                                               "expected", "produced"))
    return EXIT_REFUTED


def cmd_plot(args) -> int:
    from . import plotting
    p = _problem(args)
    if p.n > 2:
        raise UsageError("plots are available for n <= 2 only")
    _check_steps(args.steps)
    x = _point_for(p, args.point) if args.point else None
    paths = plotting.plot_problem(p, _box(p, args.box), args.steps, _out_dir(args), xbar=x,
                                  stype=SolutionType(args.type), fmt=args.format)
    _emit(args, "\n".join(str(q) for q in paths))
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quasipareto", description="Interval-valued semi-infinite "
                                 "multiobjective checks: dominance, multipliers, convexity and duality.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, point=True):
        sp.add_argument("--problem", required=True, help="problem JSON file or bundled fixture name")
        if point:
            sp.add_argument("--point", help="comma separated coordinates")
        sp.add_argument("--epsilon-zero", action="store_true", help="set every epsilon to [0, 0]")
        sp.add_argument("--t-grid", type=int, help="override the number of grid points for a T range")
        sp.add_argument("--margin", type=float, default=None, help="strictness margin for strict tests")
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
        sp.add_argument("--report", help="also write the report to this file name in the output directory")

    sp = sub.add_parser("check-solution", help="grid search for a dominating point")
    common(sp)
    sp.add_argument("--type", choices=[s.value for s in SolutionType], default="t1q")
    sp.add_argument("--box", default="-3,3")
    sp.add_argument("--steps", type=int, default=41)
    sp.add_argument("--inject", help="extra points 'a,b;c,d' scanned after the grid")
    sp.add_argument("--csv", help="witness table file name (default witness.csv)")
    sp.set_defaults(func=cmd_check_solution, need_point=True)

    sp = sub.add_parser("kkt-certify", help="search or verify a multiplier certificate")
    common(sp)
    sp.add_argument("--tol", type=float, default=KKT_TOL)
    sp.add_argument("--certificate", help="certificate file name (default certificate.json)")
    sp.add_argument("--verify", help="verify this certificate file instead of solving")
    sp.set_defaults(func=cmd_kkt_certify, need_point=True)

    sp = sub.add_parser("scalarize", help="sign scan of the max-type merit function")
    common(sp)
    sp.add_argument("--box", default="-3,3")
    sp.add_argument("--steps", type=int, default=41)
    sp.add_argument("--polish", type=int, default=0, help="descent from this many lowest grid points")
    sp.add_argument("--csv", help="write the phi table to this file name")
    sp.set_defaults(func=cmd_scalarize, need_point=True)

    sp = sub.add_parser("convexity", help="sample audit of a generalized convexity class")
    common(sp)
    sp.add_argument("--class", dest="cls", choices=[c.value for c in ConvexityClass], required=True)
    sp.add_argument("--box", default="-5,5")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--sample", help="explicit samples 'a;b' checked before the quasi-random ones")
    sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--certificate", help="write the verdict JSON to this file name")
    sp.set_defaults(func=cmd_convexity, need_point=True)

    sp = sub.add_parser("dual-check", help="Mond-Weir dual relations")
    sp.add_argument("mode", choices=["feasible", "weak", "strong", "converse"])
    common(sp)
    sp.add_argument("--y", help="dual point")
    sp.add_argument("--lambda-l", help="lower multipliers, comma separated")
    sp.add_argument("--lambda-u", help="upper multipliers, comma separated")
    sp.add_argument("--mu", default="", help="constraint multipliers 't:value,...'")
    sp.add_argument("--x", help="primal point for the weak check")
    sp.add_argument("--relation", choices=["precs", "preceq"], default="precs")
    sp.add_argument("--tol", type=float, default=KKT_TOL)
    sp.set_defaults(func=cmd_dual_check, need_point=False)

    sp = sub.add_parser("reproduce", help="rerun a bundled example and diff against its stored report")
    sp.add_argument("example")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    sp.set_defaults(func=cmd_reproduce, need_point=False)

    sp = sub.add_parser("plot", help="objective plots with witness overlay (n <= 2)")
    common(sp)
    sp.add_argument("--type", choices=[s.value for s in SolutionType], default="t2qw")
    sp.add_argument("--box", default="-3,3")
    sp.add_argument("--steps", type=int, default=61)
    sp.add_argument("--format", choices=["png", "svg"], default="png")
    sp.set_defaults(func=cmd_plot, need_point=False)
    return ap


def _glue_negative_values(argv: list) -> list:
    """Turn ``--box -3,3`` into ``--box=-3,3``; argparse would read ``-3,3`` as an option."""
    out, k = [], 0
    while k < len(argv):
        tok = argv[k]
        nxt = argv[k + 1] if k + 1 < len(argv) else None
        if tok.startswith("--") and "=" not in tok and nxt is not None and re.match(r"-[\d.]", nxt):
            out.append(f"{tok}={nxt}")
            k += 2
            continue
        out.append(tok)
        k += 1
    return out


def main(argv=None) -> int:
    ap = build_parser()
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "need_point", False) and not args.point:
        print(f"error: {args.command} needs --point", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ProblemError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - the exit code contract needs a catch-all
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
