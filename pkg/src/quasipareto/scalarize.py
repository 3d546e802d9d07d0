"""Max-type merit function for type-2 quasi-weak optimality.

For an anchor ``xbar`` the merit function is

    phi(x) = max_i max( fL_i(x) - fL_i(xbar) + epsU_i*||x - xbar||,
                        fU_i(x) - fU_i(xbar) + epsL_i*||x - xbar|| )

and ``phi(x) < 0`` at a feasible ``x`` says exactly that ``x`` dominates
``xbar`` in the strict-strict (T2QW) sense. Branch ``2i`` is the lower branch
of objective ``i``, branch ``2i + 1`` the upper one.

Each branch is evaluated as ``f(x) - (f(xbar) - eps*r)``, i.e. with the same
rounding as the shifted reference used by dominance testing, so the sign of
phi and the outcome of the T2QW test agree bit for bit when the strictness
margin is zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .interval import STRICTNESS_MARGIN
from .pareto import euclid, expand_box, grid_points
from .problem import FEAS_TOL, Problem, eval_objectives, feasible_mask, is_feasible, objective_arrays
from .subdiff import ACTIVITY_TOL, Exactness, SubdiffSet, SubdiffTerm, limiting_subdiff


@dataclass(frozen=True, eq=False)
class PhiInstance:
    problem: Problem
    xbar: np.ndarray
    fL: np.ndarray
    fU: np.ndarray

    @property
    def n_branches(self) -> int:
        return 2 * self.problem.m

    def branch_eps(self) -> np.ndarray:
        """Norm coefficient per branch: epsU for lower branches, epsL for upper ones."""
        e = self.problem.epsilon
        return np.array([v for pair in zip(e.upper, e.lower) for v in pair], dtype=float)

    def branch_expr(self, b: int):
        lower, upper = self.problem.objectives[b // 2]
        return lower if b % 2 == 0 else upper


def make_phi(p: Problem, xbar, tol: float = FEAS_TOL) -> PhiInstance:
    xbar = np.asarray(xbar, dtype=float).reshape(-1)
    if not is_feasible(p, xbar, tol):
        raise ValueError(f"anchor {xbar.tolist()} is not feasible")
    f = eval_objectives(p, xbar)
    return PhiInstance(p, xbar, np.array(f.lower, dtype=float), np.array(f.upper, dtype=float))


def phi_branches(inst: PhiInstance, X) -> np.ndarray:
    """All 2m branch values on a batch ``X`` of shape (n, N); result (2m, N)."""
    X = np.asarray(X, dtype=float)
    p = inst.problem
    FL, FU = objective_arrays(p, X)
    r = np.atleast_1d(euclid(X - inst.xbar[:, None]))[None, :]
    eps_lo = np.array(p.epsilon.lower, dtype=float)[:, None]
    eps_hi = np.array(p.epsilon.upper, dtype=float)[:, None]
    out = np.empty((2 * p.m, X.shape[1]))
    out[0::2] = FL - (inst.fL[:, None] - r * eps_hi)
    out[1::2] = FU - (inst.fU[:, None] - r * eps_lo)
    return out


def phi_batch(inst: PhiInstance, X) -> np.ndarray:
    return phi_branches(inst, X).max(axis=0)


def phi_value(inst: PhiInstance, x) -> float:
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    return float(phi_batch(inst, x)[0])


def _shift(s: SubdiffSet, v: np.ndarray, radius: float = 0.0) -> list[SubdiffTerm]:
    return [SubdiffTerm(t.vertices + v, t.radius + radius) for t in s.terms]


def phi_subdiff(inst: PhiInstance, x) -> SubdiffSet:
    """A set containing the limiting subdifferential of phi at ``x``.

    At the anchor this is the hull of the branch sets, each enlarged by its
    epsilon ball. Away from the anchor the norm is smooth and the max rule is
    applied over the active branches.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    n = inst.problem.n
    d = x - inst.xbar
    r = euclid(d)
    eps = inst.branch_eps()
    terms: list[SubdiffTerm] = []
    all_exact_points = True
    if r == 0:
        for b in range(inst.n_branches):
            s = limiting_subdiff(inst.branch_expr(b), x)
            all_exact_points &= s.exact and s.is_singleton
            terms += _shift(s, np.zeros(n), eps[b])
        ex = Exactness.EXACT if all_exact_points else Exactness.SUPERSET
        return SubdiffSet(tuple(_unique_terms(terms)), ex, hull=True)
    vals = phi_branches(inst, x.reshape(-1, 1))[:, 0]
    top = vals.max()
    active = [b for b in range(inst.n_branches) if vals[b] >= top - ACTIVITY_TOL]
    unit = d / r
    sets = []
    for b in active:
        s = limiting_subdiff(inst.branch_expr(b), x)
        all_exact_points &= s.exact and s.is_singleton
        sets.append(s)
        terms += _shift(s, eps[b] * unit)
    if len(active) == 1:
        return SubdiffSet(tuple(terms), sets[0].exactness)
    ex = Exactness.EXACT if all_exact_points else Exactness.SUPERSET
    return SubdiffSet(tuple(_unique_terms(terms)), ex, hull=True)


def _unique_terms(terms: list[SubdiffTerm]) -> list[SubdiffTerm]:
    out: list[SubdiffTerm] = []
    for t in terms:
        if any(u.radius == t.radius and u.vertices.shape == t.vertices.shape
               and np.array_equal(u.vertices, t.vertices) for u in out):
            continue
        out.append(t)
    return out


def _feasible(inst: PhiInstance, x, tol: float) -> bool:
    return bool(feasible_mask(inst.problem, x.reshape(-1, 1), tol)[0])


def minimize_phi(inst: PhiInstance, starts: Sequence, budget: int = 200, step: float = 1.0,
                 tol: float = FEAS_TOL) -> tuple[np.ndarray, float]:
    """Multistart projected subgradient descent with steps ``step/k``.

    Infeasible trial points are rejected (the iterate stays put). Returns the
    best feasible point seen; ties go to the lexicographically smaller point.
    """
    p = inst.problem
    best_x, best_v = None, np.inf
    feasible_starts = 0
    for s in starts:
        x = np.asarray(s, dtype=float).reshape(-1)
        if not _feasible(inst, x, tol):
            continue
        feasible_starts += 1
        v = phi_value(inst, x)
        cand = [(v, x)]
        for k in range(1, budget + 1):
            g = phi_subdiff(inst, x).first_selection()
            gn = float(np.sqrt(np.sum(g * g)))
            if gn == 0.0:
                break
            trial = p.omega.project(x - (step / k) * g / gn)
            if not _feasible(inst, trial, tol):
                continue
            x = trial
            cand.append((phi_value(inst, x), x))
        for v, xc in cand:
            if v < best_v or (v == best_v and best_x is not None and tuple(xc) < tuple(best_x)):
                best_v, best_x = v, xc
    if feasible_starts == 0:
        raise ValueError("no feasible start")
    return best_x.copy(), float(best_v)


@dataclass
class OracleResult:
    status: str                  # "CONSISTENT" or "WITNESS"
    x: np.ndarray | None
    value: float | None
    scanned: int
    feasible: int
    grid_min: tuple | None       # (x, phi) of the smallest feasible grid value
    polished: bool = False


def qw_oracle(inst: PhiInstance, box, steps, margin: float | None = None,
              extra_points: Sequence | None = None, polish: int = 0,
              tol: float = FEAS_TOL) -> OracleResult:
    """Grid-scan the sign of phi; optionally polish the ``polish`` lowest points by descent.

    CONSISTENT only ever means "no feasible scanned point has phi < -margin".
    """
    if margin is None:
        margin = STRICTNESS_MARGIN
    p = inst.problem
    X = grid_points(expand_box(box, p.n), steps)
    if extra_points is not None and len(extra_points):
        X = np.hstack([X, np.asarray(extra_points, dtype=float).reshape(-1, p.n).T])
    feas = feasible_mask(p, X, tol)
    res = OracleResult("CONSISTENT", None, None, X.shape[1], int(feas.sum()), None)
    if not feas.any():
        return res
    vals = np.full(X.shape[1], np.inf)
    vals[feas] = phi_batch(inst, X[:, feas])
    j_min = int(np.argmin(vals))
    res.grid_min = (X[:, j_min].copy(), float(vals[j_min]))
    hit = np.flatnonzero(vals < -margin) if margin else np.flatnonzero(vals < 0)
    if hit.size:
        j = int(hit[0])
        res.status, res.x, res.value = "WITNESS", X[:, j].copy(), float(vals[j])
        return res
    if polish > 0:
        order = np.argsort(vals, kind="stable")[:polish]
        x, v = minimize_phi(inst, [X[:, j] for j in order if np.isfinite(vals[j])], tol=tol)
        if v < -margin:
            res.status, res.x, res.value, res.polished = "WITNESS", x, v, True
    return res


def phi_table(inst: PhiInstance, box, steps, tol: float = FEAS_TOL):
    """Feasible grid points with phi and the index of the first maximizing branch."""
    X = grid_points(expand_box(box, inst.problem.n), steps)
    feas = feasible_mask(inst.problem, X, tol)
    X = X[:, feas]
    B = phi_branches(inst, X)
    return X, B.max(axis=0), B.argmax(axis=0)
