"""Deterministic end-to-end scripts for the bundled worked examples.

Each ``report_*`` function returns plain text. Numbers coming out of a
numerical solver are printed to 12 significant digits so that reports stay
byte-stable; exact arithmetic is printed with ``repr``.
"""

from __future__ import annotations

import math
from importlib import resources

import numpy as np

from .convexity import ConvexityClass, audit_class, default_samples
from .duality import (DualPoint, converse_duality_check, is_dual_feasible, lagrange_value,
                      strong_duality_pipeline, weak_duality_check)
from .interval import VecLU, vec_relation
from .kkt import Selection, build_kkt_system, make_certificate, solve_kkt, verify_certificate
from .pareto import SolutionType, falsify_on_grid, shifted_reference
from .problem import Problem, eval_objectives, load_fixture

REPORT_IDS = ("ex31", "ex32", "post32", "ex41")
AUDIT_BOX = (-5.0, 5.0)
AUDIT_SAMPLES = 200


def fmt(v) -> str:
    if v is None:
        return "none"
    return format(float(v), ".12g")


def fvec(v) -> str:
    return "(" + ", ".join(fmt(a) for a in np.asarray(v, dtype=float).reshape(-1)) + ")"


def fint(iv) -> str:
    return "[" + ", ".join(f"[{fmt(c.lo)}, {fmt(c.hi)}]" for c in iv) + "]"


def _kkt_lines(p: Problem, xbar) -> tuple[list[str], object, object]:
    sys = build_kkt_system(p, xbar)
    cert = solve_kkt(sys)
    lam = cert.lambdas()
    lines = [
        f"kkt-certify at {fvec(xbar)}: {cert.status}",
        f"  residual {fmt(cert.residual)}, lambda sum {fmt(math.fsum(lam))}, enumeration {cert.enumeration}",
        f"  lambdaL {fvec(cert.lambdaL)}, lambdaU {fvec(cert.lambdaU)}",
        "  mu " + (", ".join(f"t={fmt(t)}: {fmt(v)}" for t, v in cert.mu) or "none"),
        f"  independent verification: {'PASS' if verify_certificate(sys, cert) else 'FAIL'}",
    ]
    return lines, sys, cert


def _audit_lines(p: Problem, xbar, cls: ConvexityClass, explicit=(), seed: int = 42) -> tuple[list[str], object]:
    pts = default_samples(p, AUDIT_BOX, AUDIT_SAMPLES, seed, explicit=explicit)
    v = audit_class(p, xbar, cls, pts, seed=seed)
    lines = [f"convexity --class {cls.value} at {fvec(xbar)}: {v.status} "
             f"({v.samples} samples, {v.systems} systems, {v.undecided} undecided)"]
    if v.witness is not None:
        w = v.witness
        lines.append(f"  witness x {fvec(w.x)}, selection {[fvec(z) for z in w.vertices]}")
        if len(w.x) == 1:
            lo, hi, which = w.result.bounds_1d()
            lines.append(f"  nu >= {fmt(lo)} (from {which[0]}), nu <= {fmt(hi)} (from {which[1]})")
        lines.append(f"  dual value {fmt(w.result.dual_value)}, shuffled re-solve {w.recheck['shuffled_status']}")
    return lines, v


def _grid_lines(p: Problem, xbar, stype: SolutionType, box, steps, extra=None) -> tuple[list[str], object]:
    g = falsify_on_grid(p, xbar, stype, box, steps, extra_points=extra)
    line = (f"check-solution --type {stype.value} at {fvec(xbar)}: {g.status} "
            f"({g.scanned} scanned, {g.feasible} feasible)")
    out = [line]
    if g.witness is not None:
        out.append(f"  witness x {fvec(g.witness.x)}, f(x) {fint(g.witness.values)}")
    return out, g


def exact_probe(p: Problem, count: int = 10, kmax: int = 100, seed: int = 42):
    """With epsilon = 0, every random point is beaten in the T2QW sense by some (1/k, k)."""
    q = p.exact_mode()
    rng = np.random.default_rng(seed)
    inj = np.array([[1.0 / k, float(k)] for k in range(1, kmax + 1)])
    out = []
    for _ in range(count):
        xs = rng.uniform(-3.0, 3.0, size=2)
        g = falsify_on_grid(q, xs, SolutionType.T2QW, (-3.0, 3.0), 0, extra_points=inj)
        out.append((xs, g.witness))
    return out


def report_ex31(seed: int = 42) -> str:
    p = load_fixture("ex31")
    lines = ["example ex31", f"epsilon {fint(p.epsilon)}"]
    grid, _ = _grid_lines(p, [0.0, 0.0], SolutionType.T1Q, (-3.0, 3.0), 121)
    lines += grid
    kkt, _, _ = _kkt_lines(p, [0.0, 0.0])
    lines += kkt
    probe = exact_probe(p, seed=seed)
    hits = sum(w is not None for _, w in probe)
    lines.append(f"exact probe (epsilon = 0, injected (1/k, k), k <= 100): {hits}/{len(probe)} refuted")
    for xs, w in probe:
        lines.append(f"  x* {fvec(xs)} -> " + ("no witness" if w is None else f"witness {fvec(w.x)}"))
    return "\n".join(lines) + "\n"


def report_ex32(seed: int = 42) -> str:
    p = load_fixture("ex32")
    lines = ["example ex32", f"epsilon {fint(p.epsilon)}"]
    for st in (SolutionType.T1Q, SolutionType.T2QW):
        lines += _grid_lines(p, [0.0], st, (-5.0, 5.0), 201)[0]
    lines += _kkt_lines(p, [0.0])[0]
    for cls in (ConvexityClass.GC, ConvexityClass.SEPQ):
        lines += _audit_lines(p, [0.0], cls, explicit=[[1.0]], seed=seed)[0]
    return "\n".join(lines) + "\n"


def stated_certificate_post32(p: Problem):
    """The stated multipliers at 0: lambdaL = lambdaU = 1/2 with the slope-1/2 pieces, mu_{1/2} = 1."""
    sys = build_kkt_system(p, [0.0])
    sels = []
    for s in sys.branch_sets:
        term = next(k for k, t in enumerate(s.terms) if t.vertices.shape[0] == 1 and t.vertices[0, 0] == 0.5)
        sels.append(Selection(term, [1.0], [0.0]))
    cert = make_certificate(sys, [0.5], [0.5], [(0.5, 1.0)], sels, {0.5: Selection(0, [1.0], [0.0])})
    return sys, cert


def report_post32(seed: int = 42) -> str:
    p = load_fixture("post32")
    lines = ["example post32", f"epsilon {fint(p.epsilon)}"]
    lines += _kkt_lines(p, [0.0])[0]
    sys, cert = stated_certificate_post32(p)
    lines.append(f"stated multipliers (lambda 1/2, 1/2, mu_1/2 = 1): residual {cert.residual!r}, "
                 f"verification {'PASS' if verify_certificate(sys, cert) else 'FAIL'}")
    for cls in (ConvexityClass.GC, ConvexityClass.EPQ, ConvexityClass.SEPQ):
        lines += _audit_lines(p, [0.0], cls, explicit=[[1.0]], seed=seed)[0]
    for st in (SolutionType.T1Q, SolutionType.T2QW):
        lines += _grid_lines(p, [0.0], st, (-5.0, 5.0), 201)[0]
    d, rep = strong_duality_pipeline(p, [0.0])
    lines.append(f"dual-check strong at (0): {rep.status}, equality {rep.equality}")
    if d is not None:
        lines.append(f"  dual point y {fvec(d.y)}, lambdaL {fvec(d.lambdaL)}, lambdaU {fvec(d.lambdaU)}, "
                     "mu " + (", ".join(f"t={fmt(t)}: {fmt(v)}" for t, v in d.mu) or "none"))
    stated = DualPoint([0.0], [0.5], [0.5], [(0.5, 1.0)])
    feas = is_dual_feasible(p, stated)
    lines.append("dual-check feasible (stated multipliers): "
                 + ", ".join(f"{k} {'ok' if v else 'FAILS'}" for k, v in feas.clauses.items()))
    conv = converse_duality_check(p, stated, seed=seed)
    lines.append(f"dual-check converse: {conv.status} audits {conv.audits} "
                 f"grids {dict((k, v['status']) for k, v in conv.grids.items())}")
    return "\n".join(lines) + "\n"


def report_ex41(seed: int = 42) -> str:
    p = load_fixture("ex41")
    d = DualPoint([1.0], [0.5], [0.5], [(1.0, 1.0)])
    L = lagrange_value(p, d)
    bound = shifted_reference(p, d.y, [0.0], L)
    f0 = eval_objectives(p, [0.0])
    lines = [
        "example ex41",
        f"epsilon {fint(p.epsilon)}",
        f"L(y=1) = f(1) = {fint(L)}",
        f"L - E*||0 - 1|| = [[{bound[0].lo!r}, {bound[0].hi!r}]]",
        f"f(0) = {fint(f0)}, f(0) <^s_LU bound: {vec_relation(f0, bound, VecLU.PRECS)}",
    ]
    feas = is_dual_feasible(p, d)
    lines.append("dual-check feasible: " + ", ".join(f"{k} {'ok' if v else 'FAILS'}" for k, v in feas.clauses.items()))
    for e in feas.details["mu_g"]:
        lines.append(f"  mu_t g_t(y) at t={fmt(e['t'])}: {fmt(e['mu'])} * {fmt(e['g'])} = {fmt(e['product'])}")
    w = weak_duality_check(p, [0.0], d, VecLU.PRECS, seed=seed)
    lines.append(f"dual-check weak (x = 0): {w.status}, attached {w.audit['class']} audit {w.audit['status']}")
    conv = converse_duality_check(p, d, seed=seed)
    lines.append(f"dual-check converse: {conv.status} ({'; '.join(conv.reasons)})")
    return "\n".join(lines) + "\n"


REPORTS = {"ex31": report_ex31, "ex32": report_ex32, "post32": report_post32, "ex41": report_ex41}


def expected_report(name: str) -> str | None:
    ref = resources.files("quasipareto") / "expected" / f"{name}.txt"
    return ref.read_text() if ref.is_file() else None
