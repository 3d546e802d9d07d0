"""KKT-type multiplier certificates.

The inclusion to decide at a feasible ``xbar`` is

    0 in sum_i [lamL_i dfL_i + lamU_i dfU_i] + sum_t mu_t dg_t
         + (sum_i lamL_i epsU_i + lamU_i epsL_i) B + N(xbar; Omega)

with ``lam >= 0``, ``sum(lam) = 1`` and ``mu >= 0`` supported on active
indices. Writing ``lam_b * conv(V_b)`` as ``sum_j theta_bj v_bj`` with
``theta >= 0`` makes each choice of union terms a second-order cone
feasibility problem; union choices are enumerated.

Certificates are plain data. :func:`verify_certificate` recomputes every
invariant and the residual from the stored fields alone.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import cvxpy as cp
import numpy as np
from scipy.optimize import nnls

from .pareto import SolutionType, falsify_on_grid
from .problem import ACTIVE_TOL, OrthantCone, Problem, active_indices, is_feasible, omega_normal_polar
from .subdiff import Exactness, SubdiffSet, limiting_subdiff

KKT_TOL = 1e-8
ENUM_CAP = 4096
MU_CAP = 1e6
NORMALIZATION_TOL = 1e-12
VERIFY_TOL = 1e-10
T_MATCH_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class KKTSystem:
    n: int
    m: int
    xbar: np.ndarray
    branch_sets: tuple          # 2m SubdiffSets, interleaved (L_1, U_1, L_2, U_2, ...)
    eps: tuple                  # m pairs (epsL, epsU)
    t_values: tuple             # indices whose dg_t enter the system
    g_sets: tuple               # SubdiffSet per t
    cone: OrthantCone           # N(xbar; Omega)

    @property
    def exactness(self) -> Exactness:
        ex = Exactness.EXACT
        for s in self.branch_sets + self.g_sets:
            ex = ex & s.exactness
        return ex

    def branch_eps(self) -> np.ndarray:
        """Ball coefficient per branch: epsU for a lower branch, epsL for an upper one."""
        return np.array([v for lo, hi in self.eps for v in (hi, lo)], dtype=float)

    def all_sets(self) -> tuple:
        return self.branch_sets + self.g_sets

    def n_combinations(self) -> int:
        return math.prod(len(s.terms) for s in self.all_sets())


def _system(p: Problem, x: np.ndarray, ts: Sequence[float], tol: float) -> KKTSystem:
    branch_sets = []
    for lower, upper in p.objectives:
        branch_sets += [limiting_subdiff(lower, x), limiting_subdiff(upper, x)]
    g_sets = tuple(limiting_subdiff(p.constraint.expr, x, t) for t in ts)
    cone = omega_normal_polar(p.omega, x, tol)
    return KKTSystem(p.n, p.m, x, tuple(branch_sets), tuple((e.lo, e.hi) for e in p.epsilon),
                     tuple(float(t) for t in ts), g_sets, cone)


def build_kkt_system(p: Problem, xbar, tol: float = ACTIVE_TOL) -> KKTSystem:
    xbar = np.asarray(xbar, dtype=float).reshape(-1)
    if not is_feasible(p, xbar, tol):
        raise ValueError(f"point {xbar.tolist()} is not feasible")
    return _system(p, xbar, active_indices(p, xbar, tol), tol)


# ---------------------------------------------------------------- certificates

@dataclass
class Selection:
    """An element ``sum_j weights_j * V[term][j] + offset`` of one SubdiffSet."""
    term: int
    weights: list
    offset: list

    def to_json(self) -> dict:
        return {"term": self.term, "weights": list(self.weights), "offset": list(self.offset)}

    @classmethod
    def from_json(cls, d: dict) -> Selection:
        return cls(int(d["term"]), [float(v) for v in d["weights"]], [float(v) for v in d["offset"]])


@dataclass
class MultiplierCertificate:
    lambdaL: list
    lambdaU: list
    mu: list                    # [(t, mu_t), ...] with mu_t > 0
    branch_selections: list     # 2m Selections, interleaved like KKTSystem.branch_sets
    constraint_selections: dict  # t -> Selection, for t in support(mu)
    ball_vector: list
    normal_vector: list
    residual: float
    exactness: Exactness = Exactness.EXACT
    tol: float = KKT_TOL
    enumeration: str = "COMPLETE"
    combinations_tried: int = 0

    @property
    def certified(self) -> bool:
        return self.residual <= self.tol

    @property
    def status(self) -> str:
        return "CERTIFIED" if self.certified else "NOT-CERTIFIED"

    def lambdas(self) -> list:
        return [v for pair in zip(self.lambdaL, self.lambdaU) for v in pair]

    def to_json(self) -> dict:
        return {
            "lambdaL": list(self.lambdaL),
            "lambdaU": list(self.lambdaU),
            "mu": [[t, v] for t, v in self.mu],
            "branch_selections": [s.to_json() for s in self.branch_selections],
            "constraint_selections": [[t, s.to_json()] for t, s in self.constraint_selections.items()],
            "ball_vector": list(self.ball_vector),
            "normal_vector": list(self.normal_vector),
            "residual": self.residual,
            "exactness": self.exactness.value,
            "tol": self.tol,
            "status": self.status,
            "enumeration": self.enumeration,
            "combinations_tried": self.combinations_tried,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, d: dict) -> MultiplierCertificate:
        try:
            return cls(
                lambdaL=[float(v) for v in d["lambdaL"]],
                lambdaU=[float(v) for v in d["lambdaU"]],
                mu=[(float(t), float(v)) for t, v in d["mu"]],
                branch_selections=[Selection.from_json(s) for s in d["branch_selections"]],
                constraint_selections={float(t): Selection.from_json(s) for t, s in d["constraint_selections"]},
                ball_vector=[float(v) for v in d["ball_vector"]],
                normal_vector=[float(v) for v in d["normal_vector"]],
                residual=float(d["residual"]),
                exactness=Exactness(d.get("exactness", "EXACT")),
                tol=float(d.get("tol", KKT_TOL)),
                enumeration=d.get("enumeration", "COMPLETE"),
                combinations_tried=int(d.get("combinations_tried", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed certificate: {exc}") from exc


def _element(s: SubdiffSet, sel: Selection) -> np.ndarray:
    term = s.terms[sel.term]
    return np.asarray(sel.weights, dtype=float) @ term.vertices + np.asarray(sel.offset, dtype=float)


def _contributions(sys: KKTSystem, cert: MultiplierCertificate) -> list[np.ndarray]:
    lam = cert.lambdas()
    eps = sys.branch_eps()
    parts = [lam[b] * _element(s, sel) for b, (s, sel) in enumerate(zip(sys.branch_sets, cert.branch_selections))]
    g_of = dict(zip(sys.t_values, sys.g_sets))
    for t, mu_t in cert.mu:
        parts.append(mu_t * _element(g_of[_match_t(sys, t)], cert.constraint_selections[t]))
    r_lam = math.fsum(l * e for l, e in zip(lam, eps))
    parts.append(r_lam * np.asarray(cert.ball_vector, dtype=float))
    parts.append(np.asarray(cert.normal_vector, dtype=float))
    return parts


def certificate_residual(sys: KKTSystem, cert: MultiplierCertificate, reverse: bool = False) -> float:
    """Norm of the certified sum, accumulated per coordinate with ``math.fsum``."""
    parts = _contributions(sys, cert)
    if reverse:
        parts = parts[::-1]
    total = [math.fsum(float(p[j]) for p in parts) for j in range(sys.n)]
    return math.sqrt(math.fsum(v * v for v in total))


def _match_t(sys: KKTSystem, t: float) -> float:
    for s in sys.t_values:
        if abs(s - t) <= T_MATCH_TOL:
            return s
    raise KeyError(t)


def verify_certificate(sys: KKTSystem, cert: MultiplierCertificate, tol: float = VERIFY_TOL) -> bool:
    """Recheck every certificate invariant and the residual from raw fields."""
    return not certificate_problems(sys, cert, tol)


def certificate_problems(sys: KKTSystem, cert: MultiplierCertificate, tol: float = VERIFY_TOL) -> list[str]:
    """Human-readable list of violated invariants (empty when the certificate is valid)."""
    bad = []
    lam = cert.lambdas()
    if len(cert.lambdaL) != sys.m or len(cert.lambdaU) != sys.m:
        return ["multiplier length mismatch"]
    if len(cert.branch_selections) != 2 * sys.m:
        return ["branch selection count mismatch"]
    if len(cert.ball_vector) != sys.n or len(cert.normal_vector) != sys.n:
        return ["vector dimension mismatch"]
    if any(not math.isfinite(v) for v in lam + list(cert.ball_vector) + list(cert.normal_vector)):
        return ["non-finite entries"]
    if any(v < 0 for v in lam):
        bad.append("negative lambda")
    if abs(math.fsum(lam) - 1.0) > NORMALIZATION_TOL:
        bad.append(f"lambda sum {math.fsum(lam)!r} differs from 1")
    for t, v in cert.mu:
        if not v >= 0:
            bad.append(f"negative mu at t={t}")
        try:
            _match_t(sys, t)
        except KeyError:
            bad.append(f"mu supported at inactive index t={t}")
        if t not in cert.constraint_selections:
            bad.append(f"no subgradient selection for t={t}")
    if bad:
        return bad
    sets = list(zip(sys.branch_sets, cert.branch_selections))
    g_of = dict(zip(sys.t_values, sys.g_sets))
    sets += [(g_of[_match_t(sys, t)], cert.constraint_selections[t]) for t, _ in cert.mu]
    for s, sel in sets:
        if not 0 <= sel.term < len(s.terms):
            bad.append(f"term index {sel.term} out of range")
            continue
        term = s.terms[sel.term]
        w = np.asarray(sel.weights, dtype=float)
        if w.shape != (term.vertices.shape[0],) or np.any(w < 0) or abs(math.fsum(w) - 1.0) > NORMALIZATION_TOL:
            bad.append("selection weights are not a convex combination")
        off = np.asarray(sel.offset, dtype=float)
        if off.shape != (sys.n,) or float(np.sqrt(np.sum(off * off))) > term.radius * (1 + 1e-12) + 1e-15:
            bad.append("selection offset leaves the term's ball")
    b = np.asarray(cert.ball_vector, dtype=float)
    if float(np.sqrt(np.sum(b * b))) > 1 + 1e-12:
        bad.append("ball vector norm exceeds 1")
    if not sys.cone.contains(cert.normal_vector, 1e-12):
        bad.append("normal vector not in N(xbar; Omega)")
    if bad:
        return bad
    res = certificate_residual(sys, cert)
    if abs(res - cert.residual) > tol:
        bad.append(f"recomputed residual {res!r} differs from stored {cert.residual!r}")
    return bad


def make_certificate(sys: KKTSystem, lambdaL, lambdaU, mu, branch_selections, constraint_selections=None,
                     ball_vector=None, normal_vector=None, tol: float = KKT_TOL) -> MultiplierCertificate:
    """Assemble a certificate from explicit data, filling in the residual."""
    zero = [0.0] * sys.n
    cert = MultiplierCertificate(
        [float(v) for v in lambdaL], [float(v) for v in lambdaU],
        [(float(t), float(v)) for t, v in (mu.items() if isinstance(mu, dict) else mu)],
        list(branch_selections), dict(constraint_selections or {}),
        list(ball_vector if ball_vector is not None else zero),
        list(normal_vector if normal_vector is not None else zero), 0.0, sys.exactness, tol)
    cert.residual = certificate_residual(sys, cert)
    return cert


# ---------------------------------------------------------------- solver

@dataclass
class _Combo:
    """Flattened data for one choice of union terms."""
    V: np.ndarray           # (K, n) branch vertices
    bidx: np.ndarray        # (K,) branch of each vertex
    X: np.ndarray           # (J, n) constraint vertices
    tidx: np.ndarray        # (J,) position in sys.t_values
    rho_b: np.ndarray       # (2m,)
    rho_t: np.ndarray       # (|T|,)
    choice: tuple


def _flatten(sys: KKTSystem, choice: tuple) -> _Combo:
    nb = 2 * sys.m
    V, bidx, X, tidx = [], [], [], []
    rho_b, rho_t = np.zeros(nb), np.zeros(len(sys.t_values))
    for b in range(nb):
        term = sys.branch_sets[b].terms[choice[b]]
        V.append(term.vertices)
        bidx += [b] * term.vertices.shape[0]
        rho_b[b] = term.radius
    for k, s in enumerate(sys.g_sets):
        term = s.terms[choice[nb + k]]
        X.append(term.vertices)
        tidx += [k] * term.vertices.shape[0]
        rho_t[k] = term.radius
    X = np.vstack(X) if X else np.zeros((0, sys.n))
    return _Combo(np.vstack(V), np.array(bidx), X, np.array(tidx, dtype=int), rho_b, rho_t, choice)


def _cone_generators(cone: OrthantCone) -> np.ndarray:
    n = len(cone.signs)
    cols = []
    for j, s in enumerate(cone.signs):
        e = np.zeros(n)
        e[j] = 1.0
        if s in ("nonneg", "free"):
            cols.append(e)
        if s in ("nonpos", "free"):
            cols.append(-e)
    return np.array(cols).reshape(-1, n)


@dataclass
class _Raw:
    theta: np.ndarray
    eta: np.ndarray
    omega: np.ndarray


def _socp(sys: KKTSystem, c: _Combo, fixed_lambda=None, fixed_mu=None) -> Optional[_Raw]:
    n, nb = sys.n, 2 * sys.m
    K, J = c.V.shape[0], c.X.shape[0]
    Sb = np.zeros((nb, K))
    Sb[c.bidx, np.arange(K)] = 1.0
    theta = cp.Variable(K, nonneg=True)
    omega = cp.Variable(n)
    w = cp.Variable(n)
    lam = Sb @ theta
    radius = (sys.branch_eps() + c.rho_b) @ lam
    v = c.V.T @ theta + omega
    cons = []
    eta = None
    if J:
        St = np.zeros((len(sys.t_values), J))
        St[c.tidx, np.arange(J)] = 1.0
        eta = cp.Variable(J, nonneg=True)
        v = v + c.X.T @ eta
        radius = radius + c.rho_t @ (St @ eta)
        cons.append(cp.sum(eta) <= MU_CAP)
        if fixed_mu is not None:
            cons.append(St @ eta == fixed_mu)
    cons.append(cp.norm(w, 2) <= radius)
    if fixed_lambda is not None:
        cons.append(lam == fixed_lambda)
    else:
        cons.append(cp.sum(theta) == 1)
    for j, s in enumerate(sys.cone.signs):
        if s == "zero":
            cons.append(omega[j] == 0)
        elif s == "nonneg":
            cons.append(omega[j] >= 0)
        elif s == "nonpos":
            cons.append(omega[j] <= 0)
    prob = cp.Problem(cp.Minimize(cp.norm(v + w, 2)), cons)
    try:
        prob.solve(solver=cp.CLARABEL)
    except cp.error.SolverError:
        try:
            prob.solve(solver=cp.SCS, eps=1e-10, max_iters=200000)
        except cp.error.SolverError:
            return None
    if theta.value is None:
        return None
    return _Raw(np.asarray(theta.value, dtype=float),
                np.asarray(eta.value, dtype=float) if J else np.zeros(0),
                np.asarray(omega.value, dtype=float))


def _nnls_polish(sys: KKTSystem, c: _Combo, fixed_lambda=None, fixed_mu=None) -> Optional[_Raw]:
    """Exact-equation refinement: nonnegative least squares on the ball-free system."""
    n, nb = sys.n, 2 * sys.m
    K, J = c.V.shape[0], c.X.shape[0]
    G = _cone_generators(sys.cone)
    A_top = np.hstack([c.V.T, c.X.T, G.T])
    rows, rhs = [], []
    if fixed_lambda is None:
        rows.append(np.concatenate([np.ones(K), np.zeros(J + G.shape[0])]))
        rhs.append(1.0)
    else:
        for b in range(nb):
            r = np.zeros(K + J + G.shape[0])
            r[:K][c.bidx == b] = 1.0
            rows.append(r)
            rhs.append(float(fixed_lambda[b]))
    if fixed_mu is not None:
        for k in range(len(sys.t_values)):
            r = np.zeros(K + J + G.shape[0])
            r[K:K + J][c.tidx == k] = 1.0
            rows.append(r)
            rhs.append(float(fixed_mu[k]))
    A = np.vstack([A_top, np.array(rows)])
    b = np.concatenate([np.zeros(n), np.array(rhs)])
    try:
        z, _ = nnls(A, b, maxiter=50 * A.shape[1])
    except RuntimeError:
        return None
    omega = G.T @ z[K + J:] if G.shape[0] else np.zeros(n)
    return _Raw(z[:K], z[K:K + J], omega)


def _to_certificate(sys: KKTSystem, c: _Combo, raw: _Raw, tol: float,
                    fixed_lambda=None, fixed_mu=None) -> Optional[MultiplierCertificate]:
    n, nb = sys.n, 2 * sys.m
    theta = np.clip(raw.theta, 0.0, None)
    eta = np.clip(raw.eta, 0.0, None)
    omega = sys.cone.project(raw.omega)
    lam = np.bincount(c.bidx, weights=theta, minlength=nb)
    if fixed_lambda is None:
        total = math.fsum(lam)
        if not total > 0:
            return None
        theta, eta, omega, lam = theta / total, eta / total, omega / total, lam / total
    else:
        lam = np.asarray(fixed_lambda, dtype=float)
    mu = np.bincount(c.tidx, weights=eta, minlength=len(sys.t_values)) if eta.size else np.zeros(len(sys.t_values))
    if fixed_mu is not None:
        mu = np.asarray(fixed_mu, dtype=float)

    def weights(vals, group, idx):
        sel = vals[group == idx]
        s = math.fsum(sel)
        if s > 0:
            return sel / s
        out = np.zeros(sel.shape[0])
        out[0] = 1.0
        return out

    bw = [weights(theta, c.bidx, b) for b in range(nb)]
    tw = [weights(eta, c.tidx, k) for k in range(len(sys.t_values))] if eta.size else []
    v = np.zeros(n)
    for b in range(nb):
        v += lam[b] * (bw[b] @ sys.branch_sets[b].terms[c.choice[b]].vertices)
    for k in range(len(sys.t_values)):
        if mu[k] > 0:
            v += mu[k] * (tw[k] @ sys.g_sets[k].terms[c.choice[nb + k]].vertices)
    v += omega
    eps = sys.branch_eps()
    r_eps = math.fsum(lam * eps)
    radius = r_eps + math.fsum(lam * c.rho_b) + math.fsum(mu * c.rho_t)
    nv = float(np.sqrt(np.sum(v * v)))
    if radius > 0 and nv > 0:
        # w = -v when the ball absorbs v, otherwise the closest point of the ball
        unit = -v / radius if nv <= radius else -v / nv
    else:
        unit = np.zeros(n)
    branch_sel = [Selection(c.choice[b], bw[b].tolist(), (c.rho_b[b] * unit).tolist()) for b in range(nb)]
    cons_sel = {}
    mu_pairs = []
    for k, t in enumerate(sys.t_values):
        if mu[k] > 0:
            mu_pairs.append((t, float(mu[k])))
            cons_sel[t] = Selection(c.choice[nb + k], tw[k].tolist(), (c.rho_t[k] * unit).tolist())
    cert = MultiplierCertificate(
        [float(lam[2 * i]) for i in range(sys.m)], [float(lam[2 * i + 1]) for i in range(sys.m)],
        mu_pairs, branch_sel, cons_sel, unit.tolist(), omega.tolist(), 0.0, sys.exactness, tol)
    cert.residual = certificate_residual(sys, cert)
    return cert


def _solve_combo(sys: KKTSystem, choice: tuple, tol: float, fixed_lambda=None, fixed_mu=None):
    c = _flatten(sys, choice)
    best = None
    raw = _socp(sys, c, fixed_lambda, fixed_mu)
    if raw is not None:
        best = _to_certificate(sys, c, raw, tol, fixed_lambda, fixed_mu)
    if best is None or best.residual > 0:
        raw = _nnls_polish(sys, c, fixed_lambda, fixed_mu)
        cert = None if raw is None else _to_certificate(sys, c, raw, tol, fixed_lambda, fixed_mu)
        if cert is not None and (best is None or cert.residual < best.residual):
            best = cert
    return best


def _key(cert: MultiplierCertificate) -> tuple:
    return (cert.residual, tuple(cert.lambdas()) + tuple(v for _, v in cert.mu))


def solve_kkt(sys: KKTSystem, tol: float = KKT_TOL, cap: int = ENUM_CAP,
              fixed_lambda=None, fixed_mu=None) -> MultiplierCertificate:
    """Search union-term choices for a certificate of the inclusion.

    Enumeration stops at the first certified choice. With more than ``cap``
    choices a greedy coordinate search is used instead and a non-certified
    result is flagged INCOMPLETE-ENUMERATION. ``fixed_lambda`` (2m values,
    interleaved) and ``fixed_mu`` (one per ``sys.t_values``) freeze the
    multipliers.
    """
    sizes = [len(s.terms) for s in sys.all_sets()]
    total = math.prod(sizes)
    best = None
    tried = 0

    def consider(choice):
        nonlocal best, tried
        tried += 1
        cert = _solve_combo(sys, choice, tol, fixed_lambda, fixed_mu)
        if cert is not None and (best is None or _key(cert) < _key(best)):
            best = cert
        return cert is not None and cert.certified

    enumeration = "COMPLETE"
    if total <= cap:
        for choice in itertools.product(*[range(k) for k in sizes]):
            if consider(choice):
                enumeration = "EARLY-STOP" if tried < total else "COMPLETE"
                break
    else:
        enumeration = "INCOMPLETE-ENUMERATION"
        current = [0] * len(sizes)
        done = consider(tuple(current))
        for _ in range(2):
            if done:
                break
            improved = False
            for pos, k in enumerate(sizes):
                if done:
                    break
                for alt in range(1, k):
                    trial = list(current)
                    trial[pos] = (current[pos] + alt) % k
                    before = best.residual if best is not None else math.inf
                    done = consider(tuple(trial))
                    if best is not None and best.residual < before:
                        current, improved = trial, True
                    if done:
                        break
            if not improved:
                break
        if done:
            enumeration = "EARLY-STOP"
    if best is None:
        raise RuntimeError("cone solver failed on every union-term choice")
    best.enumeration = enumeration
    best.combinations_tried = tried
    return best


# ---------------------------------------------------------------- report

@dataclass
class NecessaryReport:
    xbar: list
    certificate: MultiplierCertificate
    grid_status: str
    witness: Optional[list]
    verdict: str
    lcq: str = "assumed"
    exactness: str = "EXACT"
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "xbar": self.xbar,
            "lcq": self.lcq,
            "exactness": self.exactness,
            "kkt_status": self.certificate.status,
            "residual": self.certificate.residual,
            "enumeration": self.certificate.enumeration,
            "grid_status": self.grid_status,
            "witness": self.witness,
            "verdict": self.verdict,
            "notes": self.notes,
        }


def necessary_condition_report(p: Problem, xbar, tol: float = KKT_TOL, box=(-3.0, 3.0), steps=41,
                               extra_points=None, whole_space_feasible: bool = False) -> NecessaryReport:
    """Couple the T2QW grid search with the multiplier search at ``xbar``.

    Verdicts: CONSISTENT-WITH-THEOREM (certificate and no witness),
    THEOREM-SILENT (a dominating point exists, so the necessary condition
    says nothing), NOT-T2QW-CANDIDATE (no certificate, so by contraposition
    ``xbar`` cannot be a type-2 quasi-weak solution, modulo the constraint
    qualification).
    """
    x = np.asarray(xbar, dtype=float).reshape(-1)
    sys = build_kkt_system(p, x)
    cert = solve_kkt(sys, tol)
    grid = falsify_on_grid(p, x, SolutionType.T2QW, box, steps, extra_points=extra_points)
    lcq = "assumed"
    notes = []
    if whole_space_feasible and sys.cone.is_zero:
        lcq = "satisfied: feasible set declared equal to R^n, so N(xbar; F) = {0}"
    if grid.witness is not None:
        verdict = "THEOREM-SILENT"
    elif cert.certified:
        verdict = "CONSISTENT-WITH-THEOREM"
    else:
        verdict = "NOT-T2QW-CANDIDATE"
        if sys.exactness is not Exactness.EXACT:
            notes.append("calculus returned supersets; failure of the relaxed inclusion still rules out the exact one")
        if cert.enumeration == "INCOMPLETE-ENUMERATION":
            verdict = "INCONCLUSIVE"
            notes.append("union-term enumeration was capped")
    return NecessaryReport(x.tolist(), cert, grid.status,
                           grid.witness.x.tolist() if grid.witness is not None else None,
                           verdict, lcq, sys.exactness.value, notes)
