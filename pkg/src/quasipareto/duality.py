"""Mond-Weir dual checks: membership, weak, strong and converse duality.

The dual objective is the primal objective evaluated at the dual point, so
nothing here is ever optimized; every routine tests a relation between given
points and reports which clause held.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .convexity import ConvexityClass, audit_class, default_samples
from .interval import IntervalVector, VecLU, vec_relation
from .kkt import KKT_TOL, NORMALIZATION_TOL, MultiplierCertificate, _system, build_kkt_system, solve_kkt
from .pareto import SolutionType, falsify_on_grid, shifted_reference
from .problem import ACTIVE_TOL, Problem, eval_objectives, is_feasible
from .expr import evaluate


@dataclass
class DualPoint:
    """A candidate ``(y, lambdaL, lambdaU, mu)``; ``mu`` is a list of ``(t, value)`` pairs."""
    y: np.ndarray
    lambdaL: list
    lambdaU: list
    mu: list = field(default_factory=list)

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float).reshape(-1)
        self.lambdaL = [float(v) for v in self.lambdaL]
        self.lambdaU = [float(v) for v in self.lambdaU]
        if len(self.lambdaL) != len(self.lambdaU):
            raise ValueError("lambdaL and lambdaU must have the same length")
        self.mu = [(float(t), float(v)) for t, v in self.mu]

    def support(self) -> list:
        return [(t, v) for t, v in self.mu if v != 0.0]

    def lambdas(self) -> list:
        return [v for pair in zip(self.lambdaL, self.lambdaU) for v in pair]

    def to_json(self) -> dict:
        return {"y": self.y.tolist(), "lambdaL": self.lambdaL, "lambdaU": self.lambdaU,
                "mu": [[t, v] for t, v in self.mu]}

    @classmethod
    def from_certificate(cls, xbar, cert: MultiplierCertificate) -> DualPoint:
        return cls(xbar, cert.lambdaL, cert.lambdaU, list(cert.mu))


def lagrange_value(p: Problem, d: DualPoint) -> IntervalVector:
    """The dual objective: ``f(y)``, independent of the multipliers."""
    return eval_objectives(p, d.y)


@dataclass
class FeasibilityReport:
    clauses: dict               # clause name -> bool
    details: dict
    certificate: Optional[MultiplierCertificate] = None

    @property
    def feasible(self) -> bool:
        return all(self.clauses.values())

    def to_json(self) -> dict:
        out = {"feasible": self.feasible, "clauses": dict(self.clauses), "details": self.details}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def is_dual_feasible(p: Problem, d: DualPoint, tol: float = KKT_TOL) -> FeasibilityReport:
    """Check each membership clause separately.

    ``inclusion``: with the given multipliers frozen, some choice of
    subgradients, ball element and normal vector sums to zero.
    ``complementarity``: ``mu_t * g_t(y) >= -tol`` on the support of ``mu``.
    ``normalization``: multipliers nonnegative and ``sum(lambda) = 1``.
    """
    clauses, details = {}, {}
    clauses["y_in_omega"] = bool(p.omega.contains(d.y))

    lam = d.lambdas()
    total = math.fsum(lam)
    signs_ok = all(v >= 0 for v in lam) and all(v >= 0 for _, v in d.mu)
    clauses["normalization"] = bool(signs_ok and abs(total - 1.0) <= NORMALIZATION_TOL
                                    and len(d.lambdaL) == p.m)
    details["lambda_sum"] = total

    products = []
    for t, v in d.support():
        g = float(evaluate(p.constraint.expr, d.y, t)) if p.constraint is not None else 0.0
        products.append({"t": t, "mu": v, "g": g, "product": v * g})
    clauses["complementarity"] = all(e["product"] >= -tol for e in products)
    details["mu_g"] = products

    cert = None
    if len(d.lambdaL) == p.m and p.omega.contains(d.y):
        support = d.support()
        sys = _system(p, d.y, [t for t, _ in support], ACTIVE_TOL)
        cert = solve_kkt(sys, tol, fixed_lambda=lam, fixed_mu=[v for _, v in support])
        clauses["inclusion"] = cert.certified
        details["inclusion_residual"] = cert.residual
    else:
        clauses["inclusion"] = False
        details["inclusion_residual"] = None
    return FeasibilityReport(clauses, details, cert)


@dataclass
class WeakDualityVerdict:
    status: str                 # HOLDS-CLAIM or VIOLATION
    mode: VecLU
    fx: IntervalVector
    bound: IntervalVector       # L(d) - E*||x - y||
    feasibility: FeasibilityReport
    x_feasible: bool
    audit: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "mode": self.mode.value,
            "f_x": self.fx.to_list(),
            "bound": self.bound.to_list(),
            "x_feasible": self.x_feasible,
            "dual_feasibility": self.feasibility.to_json(),
            "convexity_audit": self.audit,
        }


def _audit_summary(p: Problem, y, cls: ConvexityClass, x, box, samples: int, seed: int,
                   margin: float | None) -> dict:
    pts = default_samples(p, box, samples, seed, explicit=[x] if x is not None else ())
    v = audit_class(p, y, cls, pts, seed=seed, margin=margin)
    out = {"class": cls.value, "status": v.status, "samples": v.samples}
    if v.witness is not None:
        out["witness_x"] = v.witness.x
    return out


def weak_duality_check(p: Problem, x, d: DualPoint, mode: VecLU = VecLU.PRECS,
                       margin: float | None = None, audit: bool = True, box=(-5.0, 5.0),
                       samples: int = 200, seed: int = 42, tol: float = KKT_TOL) -> WeakDualityVerdict:
    """Does ``f(x)`` sit below ``L(d) - E*||x - y||`` in the given vector relation?

    The weak duality claim is that it never does. ``PRECS`` pairs with the
    EPQ hypothesis and ``PRECEQ`` with the strict one; the matching audit at
    ``y`` (with ``x`` among its samples) is attached when ``audit`` is set.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    fx = eval_objectives(p, x)
    bound = shifted_reference(p, d.y, x, lagrange_value(p, d))
    below = vec_relation(fx, bound, mode, margin)
    feas = is_dual_feasible(p, d, tol)
    cls = ConvexityClass.EPQ if mode is VecLU.PRECS else ConvexityClass.SEPQ
    summary = _audit_summary(p, d.y, cls, x, box, samples, seed, None) if audit else None
    return WeakDualityVerdict("VIOLATION" if below else "HOLDS-CLAIM", mode, fx, bound, feas,
                              is_feasible(p, x), summary)


@dataclass
class StrongDualityReport:
    status: str                 # PIPELINE-OK or PIPELINE-FAILURE
    dual: Optional[DualPoint]
    certificate: MultiplierCertificate
    equality: bool
    feasibility: Optional[FeasibilityReport]

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "dual_point": None if self.dual is None else self.dual.to_json(),
            "equality": self.equality,
            "certificate": self.certificate.to_json(),
            "dual_feasibility": None if self.feasibility is None else self.feasibility.to_json(),
        }


def strong_duality_pipeline(p: Problem, xbar, tol: float = KKT_TOL) -> tuple[Optional[DualPoint], StrongDualityReport]:
    """Turn a multiplier certificate at ``xbar`` into a dual point with ``y = xbar``."""
    xbar = np.asarray(xbar, dtype=float).reshape(-1)
    cert = solve_kkt(build_kkt_system(p, xbar), tol)
    if not cert.certified:
        return None, StrongDualityReport("PIPELINE-FAILURE", None, cert, False, None)
    d = DualPoint.from_certificate(xbar, cert)
    f = eval_objectives(p, xbar)
    L = lagrange_value(p, d)
    equal = f.lower == L.lower and f.upper == L.upper
    feas = is_dual_feasible(p, d, tol)
    status = "PIPELINE-OK" if equal and feas.feasible else "PIPELINE-FAILURE"
    return d, StrongDualityReport(status, d, cert, equal, feas)


@dataclass
class ConverseVerdict:
    status: str                 # CONSISTENT, INCONSISTENT, THEOREM-SILENT or NOT-APPLICABLE
    reasons: list
    audits: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"status": self.status, "reasons": self.reasons, "audits": self.audits, "grids": self.grids}


def converse_duality_check(p: Problem, d: DualPoint, tol: float = KKT_TOL, box=(-5.0, 5.0),
                           samples: int = 200, steps: int = 201, seed: int = 42,
                           margin: float | None = None) -> ConverseVerdict:
    """If ``y`` is primal feasible and the EPQ (SEPQ) audit passes, no T2QW (T1Q) grid witness may exist."""
    reasons = []
    feas = is_dual_feasible(p, d, tol)
    if not feas.feasible:
        failed = [k for k, ok in feas.clauses.items() if not ok]
        reasons.append("dual point infeasible: " + ", ".join(failed))
    if not is_feasible(p, d.y):
        reasons.append("y is not primal feasible")
    if reasons:
        return ConverseVerdict("NOT-APPLICABLE", reasons)
    verdict = ConverseVerdict("THEOREM-SILENT", reasons)
    pts = default_samples(p, box, samples, seed)
    pairs = ((ConvexityClass.EPQ, SolutionType.T2QW), (ConvexityClass.SEPQ, SolutionType.T1Q))
    for cls, stype in pairs:
        a = audit_class(p, d.y, cls, pts, seed=seed)
        verdict.audits[cls.value] = a.status
        if a.status != "SAMPLE-CONSISTENT":
            continue
        g = falsify_on_grid(p, d.y, stype, box, steps, margin=margin)
        verdict.grids[stype.value] = {
            "status": g.status,
            "witness": None if g.witness is None else g.witness.x.tolist(),
        }
        if g.witness is not None:
            verdict.status = "INCONSISTENT"
            reasons.append(f"{cls.value} audit passed yet {stype.value} grid witness found")
        elif verdict.status != "INCONSISTENT":
            verdict.status = "CONSISTENT"
    if verdict.status == "THEOREM-SILENT":
        reasons.append("both convexity audits falsified; the theorem does not apply")
    return verdict
