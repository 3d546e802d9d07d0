"""Sample-based falsification of the four generalized convexity classes.

For a fixed sample ``x`` and fixed subgradient selections at ``xbar`` every
class reduces to linear (strict or nonstrict) inequalities in a direction
``nu``, intersected with the ball ``||nu|| <= ||x - xbar||`` and the polar of
the normal cone:

* GC / SGC: ``<z_b, nu> <= f_b(x) - f_b(xbar)`` per objective branch (strict
  for SGC) and ``<x_t, nu> <= g_t(x) - g_t(xbar)`` for every t.
* EPQ / SEPQ: an implication whose consequent already holds at ``x`` is
  vacuous; otherwise its antecedent must fail, i.e. ``<z_b, nu> < -eps_b*d``.
  When ``g_t(x) <= g_t(xbar)`` we need ``<x_t, nu> <= 0``.

Feasibility is decided by maximizing the common slack of the strict rows.
Infeasibility comes with a multiplier vector ``y >= 0`` over the rows whose
dual value ``c.y + d*||P(-A^T y)||`` (``P`` = projection onto the polar cone)
is checked in closed form, independently of the solver.
"""

from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import cvxpy as cp
import numpy as np
from scipy.stats import qmc

from .pareto import euclid
from .problem import Problem, constraint_values, eval_objectives, omega_normal_polar, OrthantCone
from .subdiff import limiting_subdiff

SLACK_TOL = 1e-12
CERT_TOL = 1e-10
SELECTION_CAP = 4096
# consequent tests compare values computed along different rounding paths
CONSEQUENT_MARGIN = 1e-12


class ConvexityClass(enum.Enum):
    GC = "gc"
    SGC = "sgc"
    EPQ = "epq"
    SEPQ = "sepq"

    @property
    def strict(self) -> bool:
        return self in (ConvexityClass.SGC, ConvexityClass.SEPQ)


@dataclass(frozen=True, eq=False)
class Row:
    """The linear condition ``<a, nu> <= c`` (``<`` when strict)."""
    a: np.ndarray
    c: float
    strict: bool
    label: str


@dataclass
class NuResult:
    status: str                       # FEASIBLE, INFEASIBLE or UNDECIDED
    nu: Optional[np.ndarray]
    rows: list
    radius: float
    polar: OrthantCone
    slack: Optional[float] = None
    y: Optional[np.ndarray] = None    # row multipliers proving infeasibility
    dual_value: Optional[float] = None

    @property
    def feasible(self) -> bool:
        return self.status == "FEASIBLE"

    def bounds_1d(self) -> tuple[Optional[float], Optional[float], list]:
        """For n = 1: tightest lower/upper bound on nu and the rows attaining them."""
        lo, hi = -self.radius, self.radius
        lo_row, hi_row = "ball", "ball"
        for r in self.rows:
            a = float(r.a[0])
            if a > 0 and r.c / a < hi:
                hi, hi_row = r.c / a, r.label
            elif a < 0 and r.c / a > lo:
                lo, lo_row = r.c / a, r.label
        return lo, hi, [lo_row, hi_row]


def _violations(rows: Sequence[Row], nu: np.ndarray) -> tuple[float, float]:
    """Largest nonstrict violation and smallest strict slack at ``nu``."""
    worst, slack = -math.inf, math.inf
    for r in rows:
        v = float(r.a @ nu) - r.c
        if r.strict:
            slack = min(slack, -v)
        else:
            worst = max(worst, v)
    return worst, slack


def row_check(rows: Sequence[Row], nu, radius: float, polar: OrthantCone, tol: float = CERT_TOL) -> bool:
    """Does ``nu`` satisfy every row, the ball and the polar cone?"""
    nu = np.asarray(nu, dtype=float)
    if euclid(nu) > radius + tol or not polar.contains(nu, tol):
        return False
    worst, slack = _violations(rows, nu)
    return worst <= tol and slack > SLACK_TOL


def dual_bound(rows: Sequence[Row], y: np.ndarray, radius: float, polar: OrthantCone) -> float:
    """``c.y + radius * ||P(-A^T y)||``; a value <= 0 with strict mass rules out every nu."""
    A = np.array([r.a for r in rows])
    c = np.array([r.c for r in rows])
    proj = polar.project(-(A.T @ y))
    return math.fsum(c * y) + radius * euclid(proj)


def infeasibility_verified(rows: Sequence[Row], y, radius: float, polar: OrthantCone,
                           tol: float = CERT_TOL) -> bool:
    if y is None:
        return False
    y = np.asarray(y, dtype=float)
    if y.shape != (len(rows),) or np.any(y < 0):
        return False
    strict_mass = math.fsum(v for v, r in zip(y, rows) if r.strict)
    D = dual_bound(rows, y, radius, polar)
    if strict_mass > 0:
        return D / strict_mass <= tol
    total = math.fsum(y)
    return total > 0 and D / total < -tol


def _cone_constraints(nu, polar: OrthantCone) -> list:
    cons = []
    for j, s in enumerate(polar.signs):
        if s == "zero":
            cons.append(nu[j] == 0)
        elif s == "nonneg":
            cons.append(nu[j] >= 0)
        elif s == "nonpos":
            cons.append(nu[j] <= 0)
    return cons


def solve_rows(rows: Sequence[Row], radius: float, polar: OrthantCone, n: int,
               candidates: Sequence = ()) -> NuResult:
    """Decide the row system over ``{||nu|| <= radius} & polar``.

    One-dimensional systems are decided exactly from their tightest bounds;
    otherwise cheap candidates are tried before the cone program.
    """
    rows = list(rows)
    if n == 1:
        return _solve_1d(rows, radius, polar)
    for cand in candidates:
        cand = polar.project(np.asarray(cand, dtype=float))
        r = euclid(cand)
        if r > radius:
            cand = cand * (radius / r)
        if row_check(rows, cand, radius, polar):
            return NuResult("FEASIBLE", cand, rows, radius, polar, _violations(rows, cand)[1])
    return solve_rows_cone(rows, radius, polar, n)


def _solve_1d(rows: list, radius: float, polar: OrthantCone) -> NuResult:
    # bounds are (value, strict, row index or None); None marks the ball or the polar cone
    uppers = [(radius, False, None)]
    lowers = [(-radius, False, None)]
    sign = polar.signs[0]
    if sign in ("zero", "nonpos"):
        uppers.append((0.0, False, None))
    if sign in ("zero", "nonneg"):
        lowers.append((0.0, False, None))
    for k, r in enumerate(rows):
        a = float(r.a[0])
        if a > 0:
            uppers.append((r.c / a, r.strict, k))
        elif a < 0:
            lowers.append((r.c / a, r.strict, k))
        elif r.c < 0 or (r.strict and r.c <= 0):
            y = np.zeros(len(rows))
            y[k] = 1.0
            return NuResult("INFEASIBLE", None, rows, radius, polar, None, y,
                            dual_bound(rows, y, radius, polar))
    hi = min(uppers, key=lambda b: (b[0], not b[1]))
    lo = max(lowers, key=lambda b: (b[0], b[1]))
    if lo[0] < hi[0] or (lo[0] == hi[0] and not lo[1] and not hi[1]):
        nu = np.array([0.5 * (lo[0] + hi[0])])
        worst, slack = _violations(rows, nu)
        status = "FEASIBLE" if row_check(rows, nu, radius, polar) else "UNDECIDED"
        return NuResult(status, nu, rows, radius, polar, slack)
    y = np.zeros(len(rows))
    for value, _, k in (hi, lo):
        if k is not None:
            y[k] = 1.0 / abs(float(rows[k].a[0]))
    return NuResult("INFEASIBLE", None, rows, radius, polar, min(0.0, hi[0] - lo[0]), y,
                    dual_bound(rows, y, radius, polar))


def solve_rows_cone(rows: Sequence[Row], radius: float, polar: OrthantCone, n: int) -> NuResult:
    """Two-stage cone program: nonstrict feasibility, then the largest common strict slack."""
    rows = list(rows)
    strict_idx = [k for k, r in enumerate(rows) if r.strict]
    loose_idx = [k for k, r in enumerate(rows) if not r.strict]
    nu = cp.Variable(n)
    base = [cp.norm(nu, 2) <= radius] + _cone_constraints(nu, polar)
    relax = 0.0
    if loose_idx:
        u = cp.Variable()
        A = np.array([rows[k].a for k in loose_idx])
        c = np.array([rows[k].c for k in loose_idx])
        rc = A @ nu - c <= u
        _solve(cp.Problem(cp.Minimize(u), base + [rc, u >= -1.0]))
        if u.value is None:
            return NuResult("UNDECIDED", None, rows, radius, polar)
        if u.value > CERT_TOL:
            y = np.zeros(len(rows))
            y[loose_idx] = np.clip(np.asarray(rc.dual_value, dtype=float), 0, None)
            if infeasibility_verified(rows, y, radius, polar):
                return NuResult("INFEASIBLE", None, rows, radius, polar, None, y,
                                dual_bound(rows, y, radius, polar))
        relax = max(float(u.value), 0.0)
        if not strict_idx:
            v = np.asarray(nu.value, dtype=float)
            status = "FEASIBLE" if row_check(rows, v, radius, polar) else "UNDECIDED"
            return NuResult(status, v, rows, radius, polar, math.inf)
    s = cp.Variable()
    rs = np.array([rows[k].a for k in strict_idx]) @ nu + s <= np.array([rows[k].c for k in strict_idx])
    cons = base + [rs, s <= 1.0]
    rl = None
    if loose_idx:
        rl = np.array([rows[k].a for k in loose_idx]) @ nu <= np.array([rows[k].c for k in loose_idx]) + relax
        cons.append(rl)
    _solve(cp.Problem(cp.Maximize(s), cons))
    if s.value is None:
        return NuResult("UNDECIDED", None, rows, radius, polar)
    v = np.asarray(nu.value, dtype=float)
    if s.value > SLACK_TOL and row_check(rows, v, radius, polar):
        return NuResult("FEASIBLE", v, rows, radius, polar, float(s.value))
    y = np.zeros(len(rows))
    y[strict_idx] = np.clip(np.asarray(rs.dual_value, dtype=float), 0, None)
    if rl is not None:
        y[loose_idx] = np.clip(np.asarray(rl.dual_value, dtype=float), 0, None)
    status = "INFEASIBLE" if infeasibility_verified(rows, y, radius, polar) else "UNDECIDED"
    return NuResult(status, None, rows, radius, polar, float(s.value), y, dual_bound(rows, y, radius, polar))


def _solve(prob: cp.Problem):
    try:
        prob.solve(solver=cp.CLARABEL)
    except cp.error.SolverError:
        prob.solve(solver=cp.SCS, eps=1e-10, max_iters=200000)


# ---------------------------------------------------------------- per-sample systems

@dataclass(frozen=True, eq=False)
class Anchor:
    """Everything about ``xbar`` that every sample reuses."""
    problem: Problem
    xbar: np.ndarray
    fbar: object
    gbar: np.ndarray
    ts: np.ndarray
    branch_vertices: tuple    # 2m arrays of candidate z (interleaved L, U)
    g_vertices: tuple         # |T| arrays of candidate x_t
    polar: OrthantCone

    def selection_sizes(self) -> list[int]:
        return [v.shape[0] for v in self.branch_vertices + self.g_vertices]


def make_anchor(p: Problem, xbar) -> Anchor:
    xbar = np.asarray(xbar, dtype=float).reshape(-1)
    ts = p.t_grid()
    bv = []
    for lower, upper in p.objectives:
        for e in (lower, upper):
            bv.append(np.unique(limiting_subdiff(e, xbar).all_vertices(), axis=0))
    gv = tuple(np.unique(limiting_subdiff(p.constraint.expr, xbar, t).all_vertices(), axis=0)
               for t in ts) if p.constraint is not None else ()
    gbar = constraint_values(p, xbar) if p.constraint is not None else np.zeros(0)
    return Anchor(p, xbar, eval_objectives(p, xbar), np.asarray(gbar, dtype=float), ts,
                  tuple(bv), gv, omega_normal_polar(p.omega, xbar).polar())


def build_rows(anchor: Anchor, x, selection: Sequence[int], cls: ConvexityClass,
               margin: float | None = None) -> tuple[list[Row], float]:
    """Rows of the class system for sample ``x`` and vertex indices ``selection``.

    A consequent ``f >= ref`` counts as failed only when ``f < ref - margin``;
    a strict consequent ``f > ref`` needs ``f > ref + margin``.
    """
    if margin is None:
        margin = CONSEQUENT_MARGIN
    p = anchor.problem
    x = np.asarray(x, dtype=float).reshape(-1)
    d = euclid(x - anchor.xbar)
    fx = eval_objectives(p, x)
    gx = constraint_values(p, x) if p.constraint is not None else np.zeros(0)
    nb = 2 * p.m
    rows = []
    for b in range(nb):
        i, upper = divmod(b, 2)
        z = anchor.branch_vertices[b][selection[b]]
        fb = fx[i].hi if upper else fx[i].lo
        fbar = anchor.fbar[i].hi if upper else anchor.fbar[i].lo
        name = f"f{'U' if upper else 'L'}{i + 1}"
        if cls in (ConvexityClass.GC, ConvexityClass.SGC):
            rows.append(Row(z, fb - fbar, cls.strict, name))
        else:
            eps = p.epsilon[i].lo if upper else p.epsilon[i].hi
            ref = fbar - eps * d
            holds = fb > ref + margin if cls.strict else not fb < ref - margin
            if not holds:
                rows.append(Row(z, -eps * d, True, name))
    for k, t in enumerate(anchor.ts):
        xt = anchor.g_vertices[k][selection[nb + k]]
        if cls in (ConvexityClass.GC, ConvexityClass.SGC):
            rows.append(Row(xt, float(gx[k] - anchor.gbar[k]), False, f"g[t={t:g}]"))
        elif gx[k] <= anchor.gbar[k]:
            rows.append(Row(xt, 0.0, False, f"g[t={t:g}]"))
    return [r for r in rows if np.any(r.a != 0) or _nontrivial(r)], d


def _nontrivial(r: Row) -> bool:
    """A zero row matters only when it is violated outright."""
    return (r.c <= 0) if r.strict else (r.c < 0)


def nu_feasible(anchor: Anchor, x, selection: Sequence[int], cls: ConvexityClass,
                margin: float | None = None) -> NuResult:
    rows, d = build_rows(anchor, x, selection, cls, margin)
    x = np.asarray(x, dtype=float).reshape(-1)
    return solve_rows(rows, d, anchor.polar, anchor.problem.n,
                      candidates=(np.zeros(anchor.problem.n), x - anchor.xbar))


# ---------------------------------------------------------------- audits

@dataclass
class Witness:
    x: list
    selection: list
    vertices: list
    result: NuResult
    recheck: dict = field(default_factory=dict)


@dataclass
class ConvexityVerdict:
    cls: ConvexityClass
    xbar: list
    status: str                  # FALSIFIED or SAMPLE-CONSISTENT
    samples: int
    systems: int
    witness: Optional[Witness] = None
    nus: list = field(default_factory=list)   # (sample index, selection, nu) when consistent
    enumeration: str = "COMPLETE"
    undecided: int = 0
    seed: Optional[int] = None

    def to_json(self) -> dict:
        out = {
            "class": self.cls.value,
            "xbar": self.xbar,
            "status": self.status,
            "samples": self.samples,
            "systems": self.systems,
            "enumeration": self.enumeration,
            "undecided": self.undecided,
            "seed": self.seed,
        }
        if self.witness is not None:
            w = self.witness
            lo, hi, which = w.result.bounds_1d() if len(w.x) == 1 else (None, None, None)
            out["witness"] = {
                "x": w.x,
                "selection": w.vertices,
                "rows": [{"label": r.label, "a": r.a.tolist(), "c": r.c, "strict": r.strict}
                         for r in w.result.rows],
                "radius": w.result.radius,
                "multipliers": None if w.result.y is None else w.result.y.tolist(),
                "dual_value": w.result.dual_value,
                "recheck": w.recheck,
            }
            if lo is not None:
                out["witness"]["nu_bounds"] = {"lower": lo, "upper": hi, "from": which}
        return out


def default_samples(p: Problem, box, count: int, seed: int = 42, explicit: Sequence = ()) -> np.ndarray:
    """Explicit points first, then a scrambled Halton sequence over ``box``; all kept in Omega."""
    box = np.asarray(box, dtype=float)
    if box.ndim == 1:
        box = np.tile(box, (p.n, 1))
    pts = [np.asarray(e, dtype=float).reshape(-1) for e in explicit]
    if count > 0:
        h = qmc.Halton(d=p.n, scramble=True, seed=seed).random(count)
        pts += list(qmc.scale(h, box[:, 0], box[:, 1]))
    pts = [x for x in pts if p.omega.contains(x)]
    return np.array(pts).reshape(-1, p.n)


def _selections(anchor: Anchor, cap: int):
    sizes = anchor.selection_sizes()
    total = math.prod(sizes)
    it = itertools.product(*[range(k) for k in sizes])
    return (itertools.islice(it, cap) if total > cap else it), total > cap


def _audit_sample(anchor: Anchor, x, cls: ConvexityClass, cap: int, margin: float | None = None):
    results = []
    sel_iter, capped = _selections(anchor, cap)
    for sel in sel_iter:
        res = nu_feasible(anchor, x, sel, cls, margin)
        results.append((list(sel), res))
        if res.status == "INFEASIBLE":
            break
    return results, capped


def _recheck(anchor: Anchor, x, sel, cls: ConvexityClass, seed: int, margin: float | None) -> dict:
    """Independent re-solve of a falsifying system: shuffled rows, cone program."""
    rows, d = build_rows(anchor, x, sel, cls, margin)
    order = np.random.default_rng(seed).permutation(len(rows))
    shuffled = [rows[k] for k in order]
    res = solve_rows_cone(shuffled, d, anchor.polar, anchor.problem.n)
    return {
        "shuffled_status": res.status,
        "dual_certificate_verified": bool(res.y is not None
                                          and infeasibility_verified(shuffled, res.y, d, anchor.polar)),
    }


def audit_class(p: Problem, xbar, cls: ConvexityClass, samples: Sequence, cap: int = SELECTION_CAP,
                jobs: int = 1, seed: int = 42, margin: float | None = None) -> ConvexityVerdict:
    """Run the per-sample systems; the first infeasible one (in sample order) falsifies the class."""
    anchor = make_anchor(p, xbar)
    xs = [np.asarray(x, dtype=float).reshape(-1) for x in samples]
    if cls.strict:
        xs = [x for x in xs if np.any(x != anchor.xbar)]
    verdict = ConvexityVerdict(cls, anchor.xbar.tolist(), "SAMPLE-CONSISTENT", len(xs), 0, seed=seed)
    if jobs > 1 and len(xs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_audit_sample, [anchor] * len(xs), xs, [cls] * len(xs), [cap] * len(xs),
                                         [margin] * len(xs)))
    else:
        outcomes = None
    for k, x in enumerate(xs):
        results, capped = outcomes[k] if outcomes is not None else _audit_sample(anchor, x, cls, cap, margin)
        if capped:
            verdict.enumeration = "INCOMPLETE-ENUMERATION"
        for sel, res in results:
            verdict.systems += 1
            if res.status == "INFEASIBLE":
                verts = [anchor.branch_vertices[b][sel[b]].tolist() for b in range(2 * p.m)]
                w = Witness(x.tolist(), sel, verts, res)
                w.recheck = _recheck(anchor, x, sel, cls, seed, margin)
                verdict.status, verdict.witness, verdict.nus = "FALSIFIED", w, []
                return verdict
            if res.status == "UNDECIDED":
                verdict.undecided += 1
            else:
                verdict.nus.append((k, sel, res.nu.tolist()))
    return verdict


@dataclass
class ImplicationReport:
    pairs_checked: int = 0
    gc_feasible: int = 0
    passed: int = 0
    violations: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return "HOLDS" if not self.violations else "VIOLATED"


def convexity_implication_check(p: Problem, xbar, samples: Sequence, cap: int = SELECTION_CAP,
                                strict: bool = False, margin: float | None = None) -> ImplicationReport:
    """Each nu found for the GC (SGC) system must also satisfy the EPQ (SEPQ) system."""
    anchor = make_anchor(p, xbar)
    gc, epq = (ConvexityClass.SGC, ConvexityClass.SEPQ) if strict else (ConvexityClass.GC, ConvexityClass.EPQ)
    rep = ImplicationReport()
    for x in samples:
        x = np.asarray(x, dtype=float).reshape(-1)
        if strict and not np.any(x != anchor.xbar):
            continue
        sel_iter, _ = _selections(anchor, cap)
        for sel in sel_iter:
            rep.pairs_checked += 1
            res = nu_feasible(anchor, x, sel, gc, margin)
            if not res.feasible:
                continue
            rep.gc_feasible += 1
            rows, d = build_rows(anchor, x, sel, epq, margin)
            if row_check(rows, res.nu, d, anchor.polar):
                rep.passed += 1
            else:
                rep.violations.append((x.tolist(), list(sel), res.nu.tolist()))
    return rep
