"""The four approximate quasi Pareto notions, decided by dominance testing.

A point ``x`` *dominates* ``xbar`` for a solution type when ``f(x)`` sits
below the shifted reference ``f(xbar) - E*||x - xbar||`` in the sense of that
type's system. ``xbar`` has the solution property iff no feasible ``x``
dominates it; on a finite grid we can only ever refute the property or
report it as grid-certified.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .interval import LU, IntervalVector, iv_scale, iv_sub, lu_compare, STRICTNESS_MARGIN
from .problem import FEAS_TOL, Problem, eval_objectives, feasible_mask, objective_arrays

GRID_CHUNK = 65536


class SolutionType(enum.Enum):
    T1Q = "t1q"    # type-1 quasi Pareto: all <=_LU, one <_LU
    T2Q = "t2q"    # type-2 quasi Pareto: all <=_LU, one <^s_LU
    T1QW = "t1qw"  # type-1 quasi-weakly Pareto: all <_LU
    T2QW = "t2qw"  # type-2 quasi-weakly Pareto: all <^s_LU


# A witness against the key type refutes membership in every listed type.
REFUTES = {
    SolutionType.T2QW: (SolutionType.T2QW, SolutionType.T2Q, SolutionType.T1QW, SolutionType.T1Q),
    SolutionType.T2Q: (SolutionType.T2Q, SolutionType.T1Q),
    SolutionType.T1QW: (SolutionType.T1QW, SolutionType.T1Q),
    SolutionType.T1Q: (SolutionType.T1Q,),
}


@dataclass(frozen=True)
class Relation:
    leq: bool
    lt: bool
    lts: bool


@dataclass(frozen=True, eq=False)
class Witness:
    x: np.ndarray
    stype: SolutionType
    values: IntervalVector
    reference: IntervalVector
    relations: tuple

    def satisfies(self, stype: SolutionType) -> bool:
        return system_holds(stype, self.relations)


def euclid(d: np.ndarray) -> np.ndarray | float:
    """Euclidean norm along axis 0; one formula for single points and batches."""
    d = np.asarray(d, dtype=float)
    out = np.sqrt(np.sum(d * d, axis=0))
    return float(out) if np.ndim(out) == 0 else out


def system_holds(stype: SolutionType, relations: Sequence[Relation]) -> bool:
    if stype is SolutionType.T1Q:
        return all(r.leq for r in relations) and any(r.lt for r in relations)
    if stype is SolutionType.T2Q:
        return all(r.leq for r in relations) and any(r.lts for r in relations)
    if stype is SolutionType.T1QW:
        return all(r.lt for r in relations)
    if stype is SolutionType.T2QW:
        return all(r.lts for r in relations)
    raise ValueError(f"unknown solution type {stype!r}")


def shifted_reference(p: Problem, xbar, x, fbar: IntervalVector | None = None) -> IntervalVector:
    """Componentwise ``f_i(xbar) - E_i * ||x - xbar||``."""
    xbar = np.asarray(xbar, dtype=float).reshape(-1)
    x = np.asarray(x, dtype=float).reshape(-1)
    r = euclid(x - xbar)
    if fbar is None:
        fbar = eval_objectives(p, xbar)
    return IntervalVector(iv_sub(f, iv_scale(r, e)) for f, e in zip(fbar, p.epsilon))


def relations_at(p: Problem, xbar, x, margin: float | None = None,
                 fbar: IntervalVector | None = None) -> tuple[IntervalVector, IntervalVector, tuple]:
    fx = eval_objectives(p, x)
    ref = shifted_reference(p, xbar, x, fbar)
    rels = tuple(Relation(lu_compare(a, b, LU.LEQ, margin), lu_compare(a, b, LU.LT, margin),
                          lu_compare(a, b, LU.LTS, margin)) for a, b in zip(fx, ref))
    return fx, ref, rels


def beats(p: Problem, xbar, x, stype: SolutionType, margin: float | None = None,
          fbar: IntervalVector | None = None) -> Optional[Witness]:
    """Return a :class:`Witness` iff ``x`` satisfies the dominance system of ``stype``.

    Feasibility of ``x`` is the caller's responsibility.
    """
    fx, ref, rels = relations_at(p, xbar, x, margin, fbar)
    if not system_holds(stype, rels):
        return None
    return Witness(np.asarray(x, dtype=float).reshape(-1).copy(), stype, fx, ref, rels)


def dominance_mask(p: Problem, xbar, X: np.ndarray, stype: SolutionType,
                   margin: float | None = None, fbar: IntervalVector | None = None) -> np.ndarray:
    """Vectorized counterpart of :func:`beats` over a batch ``X`` of shape (n, N)."""
    if margin is None:
        margin = STRICTNESS_MARGIN
    xbar = np.asarray(xbar, dtype=float).reshape(-1)
    if fbar is None:
        fbar = eval_objectives(p, xbar)
    FL, FU = objective_arrays(p, X)
    r = euclid(X - xbar[:, None])
    r = np.atleast_1d(r)
    eps_lo = np.array(p.epsilon.lower, dtype=float)[:, None]
    eps_hi = np.array(p.epsilon.upper, dtype=float)[:, None]
    ref_lo = np.array(fbar.lower, dtype=float)[:, None] - r[None, :] * eps_hi
    ref_hi = np.array(fbar.upper, dtype=float)[:, None] - r[None, :] * eps_lo
    if margin:
        lt_lo, lt_hi = FL < ref_lo - margin, FU < ref_hi - margin
    else:
        lt_lo, lt_hi = FL < ref_lo, FU < ref_hi
    leq = (FL <= ref_lo) & (FU <= ref_hi)
    lt = leq & (lt_lo | lt_hi)
    lts = lt_lo & lt_hi
    if stype is SolutionType.T1Q:
        return np.all(leq, axis=0) & np.any(lt, axis=0)
    if stype is SolutionType.T2Q:
        return np.all(leq, axis=0) & np.any(lts, axis=0)
    if stype is SolutionType.T1QW:
        return np.all(lt, axis=0)
    return np.all(lts, axis=0)


def grid_points(box, steps) -> np.ndarray:
    """Row-major grid over ``box`` = [(lo, hi), ...] (or one pair for all axes).

    Returns an array of shape (n, N); ``steps`` may be an int or one count per axis.
    """
    box = np.asarray(box, dtype=float)
    if box.ndim == 1:
        box = box.reshape(1, 2)
    n = box.shape[0]
    steps = [int(steps)] * n if np.ndim(steps) == 0 else [int(s) for s in steps]
    if any(s <= 0 for s in steps):
        return np.zeros((n, 0))
    axes = []
    for (lo, hi), s in zip(box, steps):
        if s == 1:
            axes.append(np.array([lo]))
        else:
            k = np.arange(s)
            axes.append(lo + (hi - lo) * (k / (s - 1)))
    return np.array(np.meshgrid(*axes, indexing="ij")).reshape(n, -1)


def expand_box(box, n: int) -> list:
    box = np.asarray(box, dtype=float)
    if box.ndim == 1:
        return [tuple(box)] * n
    return [tuple(b) for b in box]


@dataclass
class GridReport:
    stype: SolutionType
    xbar: np.ndarray
    witness: Optional[Witness]
    index: Optional[int]
    scanned: int
    feasible: int
    box: list
    steps: list
    extra: int = 0
    notes: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return "WITNESS" if self.witness is not None else "GRID-CERTIFIED"


def falsify_on_grid(p: Problem, xbar, stype: SolutionType, box, steps,
                    extra_points: Sequence | None = None, margin: float | None = None,
                    tol: float = FEAS_TOL) -> GridReport:
    """Scan feasible grid points (then ``extra_points``) for the first dominating point.

    A report without witness certifies the solution property relative to the
    scanned points only.
    """
    xbar = np.asarray(xbar, dtype=float).reshape(-1)
    fbar = eval_objectives(p, xbar)
    X = grid_points(expand_box(box, p.n), steps)
    n_grid = X.shape[1]
    if extra_points is not None and len(extra_points):
        E = np.asarray(extra_points, dtype=float).reshape(-1, p.n).T
        X = np.hstack([X, E])
    steps_list = [int(steps)] * p.n if np.ndim(steps) == 0 else [int(s) for s in steps]
    report = GridReport(stype, xbar, None, None, X.shape[1], 0, expand_box(box, p.n), steps_list,
                        extra=X.shape[1] - n_grid)
    for start in range(0, X.shape[1], GRID_CHUNK):
        chunk = X[:, start:start + GRID_CHUNK]
        feas = feasible_mask(p, chunk, tol)
        report.feasible += int(feas.sum())
        if not feas.any():
            continue
        hit = np.flatnonzero(feas & dominance_mask(p, xbar, chunk, stype, margin, fbar))
        if hit.size:
            j = int(hit[0])
            w = beats(p, xbar, chunk[:, j], stype, margin, fbar)
            if w is None:
                raise RuntimeError(f"vectorized and scalar dominance disagree at {chunk[:, j]}")
            report.witness = w
            report.index = start + j
            # count the remaining feasible points for reporting completeness
            rest = X[:, start + GRID_CHUNK:]
            if rest.shape[1]:
                report.feasible += int(feasible_mask(p, rest, tol).sum())
            break
    return report


def inclusion_audit(p: Problem, xbar, w: Witness, margin: float | None = None) -> list[SolutionType]:
    """Every solution type refuted by the witness, via the inclusion lattice."""
    _, _, rels = relations_at(p, xbar, w.x, margin)
    if not system_holds(w.stype, rels):
        raise ValueError(f"malformed witness: x={w.x.tolist()} does not satisfy the {w.stype.value} system")
    refuted = set()
    for st in SolutionType:
        if system_holds(st, rels):
            refuted.update(REFUTES[st])
    return [st for st in SolutionType if st in refuted]


def witness_rows(p: Problem, witnesses: Sequence[Witness]) -> tuple[list[str], list[list]]:
    """Header and rows for a CSV dump of witnesses."""
    header = [f"x{j + 1}" for j in range(p.n)]
    for i in range(p.m):
        header += [f"fL{i + 1}", f"fU{i + 1}", f"leq{i + 1}", f"lt{i + 1}", f"lts{i + 1}"]
    rows = []
    for w in witnesses:
        row = [repr(float(v)) for v in w.x]
        for f, r in zip(w.values, w.relations):
            row += [repr(float(f.lo)), repr(float(f.hi)), int(r.leq), int(r.lt), int(r.lts)]
        rows.append(row)
    return header, rows

