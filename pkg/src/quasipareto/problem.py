"""Semi-infinite interval-valued multiobjective problem instances.

A problem holds m interval objectives ``[lower_i(x), upper_i(x)]``, one
constraint family ``g_t(x) <= 0`` indexed by a (discretized) set T, a closed
set Omega (whole space or a box) and the approximation vector E.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .expr import Expr, ExprError, evaluate, parse_expr
from .interval import Interval, IntervalError, IntervalVector

FEAS_TOL = 1e-9
ACTIVE_TOL = 1e-9
DEFAULT_T_GRID = 101


class ProblemError(ValueError):
    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class StandingAssumptionWarning(UserWarning):
    """Sampled check found lower_i(x) > upper_i(x)."""


# ---------------------------------------------------------------- index set T

@dataclass(frozen=True)
class FiniteList:
    values: tuple

    def __post_init__(self):
        vals = tuple(sorted(float(v) for v in self.values))
        if not vals:
            raise ProblemError("index list must not be empty")
        if len(set(vals)) != len(vals):
            raise ProblemError("index values must be distinct")
        object.__setattr__(self, "values", vals)

    def grid(self) -> np.ndarray:
        return np.array(self.values)

    def to_json(self) -> dict:
        return {"list": list(self.values)}


@dataclass(frozen=True)
class TRange:
    lo: float
    hi: float
    grid_count: int = DEFAULT_T_GRID

    def __post_init__(self):
        if self.grid_count < 2:
            raise ProblemError("grid count must be >= 2")
        if not self.lo < self.hi:
            raise ProblemError(f"empty range [{self.lo}, {self.hi}]")

    def grid(self) -> np.ndarray:
        k = np.arange(self.grid_count)
        # k/(K-1) keeps grid points such as 1/2 exact
        return self.lo + (self.hi - self.lo) * (k / (self.grid_count - 1))

    def to_json(self) -> dict:
        return {"range": [self.lo, self.hi], "grid": self.grid_count}


# ---------------------------------------------------------------- Omega and cones

_POLAR = {"zero": "free", "free": "zero", "nonneg": "nonpos", "nonpos": "nonneg"}


@dataclass(frozen=True)
class OrthantCone:
    """Product of one-dimensional cones: {0}, R_+, R_-, or R per coordinate."""

    signs: tuple

    def polar(self) -> OrthantCone:
        return OrthantCone(tuple(_POLAR[s] for s in self.signs))

    @property
    def is_zero(self) -> bool:
        return all(s == "zero" for s in self.signs)

    def contains(self, v, tol: float = 0.0) -> bool:
        v = np.asarray(v, dtype=float).reshape(-1)
        for s, vi in zip(self.signs, v):
            if s == "zero" and abs(vi) > tol:
                return False
            if s == "nonneg" and vi < -tol:
                return False
            if s == "nonpos" and vi > tol:
                return False
        return True

    def project(self, v) -> np.ndarray:
        v = np.array(v, dtype=float).reshape(-1)
        for j, s in enumerate(self.signs):
            if s == "zero":
                v[j] = 0.0
            elif s == "nonneg":
                v[j] = max(v[j], 0.0)
            elif s == "nonpos":
                v[j] = min(v[j], 0.0)
        return v


@dataclass(frozen=True)
class WholeSpace:
    n: int

    def contains(self, x, tol: float = 0.0) -> bool:
        return True

    def contains_batch(self, X: np.ndarray, tol: float = 0.0) -> np.ndarray:
        return np.ones(X.shape[1:], dtype=bool)

    def project(self, x) -> np.ndarray:
        return np.array(x, dtype=float)

    def to_json(self) -> dict:
        return {"type": "all"}


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi):
            raise ProblemError("box bounds have different lengths")
        if any(a > b for a, b in zip(lo, hi)):
            raise ProblemError("box lower bound exceeds upper bound")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def n(self) -> int:
        return len(self.lo)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float).reshape(-1)
        return bool(np.all(x >= np.array(self.lo) - tol) and np.all(x <= np.array(self.hi) + tol))

    def contains_batch(self, X: np.ndarray, tol: float = 0.0) -> np.ndarray:
        shape = (-1,) + (1,) * (X.ndim - 1)
        lo = np.array(self.lo).reshape(shape)
        hi = np.array(self.hi).reshape(shape)
        return np.all((X >= lo - tol) & (X <= hi + tol), axis=0)

    def project(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lo, self.hi)

    def to_json(self) -> dict:
        enc = lambda v: v if np.isfinite(v) else ("inf" if v > 0 else "-inf")  # noqa: E731
        return {"type": "box", "lo": [enc(v) for v in self.lo], "hi": [enc(v) for v in self.hi]}


def omega_normal_polar(omega, x, tol: float = 0.0) -> OrthantCone:
    """Normal cone N(x; Omega) for the supported Omega classes; use ``.polar()`` for its polar."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if isinstance(omega, WholeSpace):
        return OrthantCone(("zero",) * omega.n)
    if not omega.contains(x, tol):
        raise ProblemError(f"point {x.tolist()} is not in Omega")
    signs = []
    for xj, lo, hi in zip(x, omega.lo, omega.hi):
        at_lo = abs(xj - lo) <= tol
        at_hi = abs(xj - hi) <= tol
        if at_lo and at_hi:
            signs.append("free")
        elif at_lo:
            signs.append("nonpos")
        elif at_hi:
            signs.append("nonneg")
        else:
            signs.append("zero")
    return OrthantCone(tuple(signs))


# ---------------------------------------------------------------- problem

@dataclass(frozen=True)
class Constraint:
    param: str
    index_set: FiniteList | TRange
    expr: Expr

    def t_grid(self) -> np.ndarray:
        return self.index_set.grid()


@dataclass(frozen=True)
class Problem:
    n: int
    objectives: tuple  # of (lower Expr, upper Expr)
    constraint: Optional[Constraint]
    omega: WholeSpace | Box
    epsilon: IntervalVector
    name: str = ""
    source: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if len(self.objectives) != len(self.epsilon):
            raise ProblemError(f"{len(self.objectives)} objectives but {len(self.epsilon)} epsilon intervals")
        for i, e in enumerate(self.epsilon):
            if e.lo < 0:
                raise ProblemError("epsilon lower endpoint must be nonnegative", f"epsilon[{i}]")

    @property
    def m(self) -> int:
        return len(self.objectives)

    def t_grid(self) -> np.ndarray:
        return np.zeros(0) if self.constraint is None else self.constraint.t_grid()

    def with_epsilon(self, epsilon: IntervalVector | Sequence) -> Problem:
        if not isinstance(epsilon, IntervalVector):
            epsilon = IntervalVector.from_pairs(epsilon)
        return replace(self, epsilon=epsilon)

    def exact_mode(self) -> Problem:
        """Same problem with E = 0 (exact Pareto notions)."""
        return self.with_epsilon([[0.0, 0.0]] * self.m)

    def with_t_grid(self, count: int) -> Problem:
        c = self.constraint
        if c is None or not isinstance(c.index_set, TRange):
            return self
        ts = TRange(c.index_set.lo, c.index_set.hi, count)
        return replace(self, constraint=replace(c, index_set=ts))


def _point(p: Problem, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != p.n:
        raise ValueError(f"point has dimension {x.shape[0]}, expected {p.n}")
    return x


def objective_arrays(p: Problem, X) -> tuple[np.ndarray, np.ndarray]:
    """Lower/upper objective values on a batch ``X`` of shape (n, N): arrays (m, N)."""
    X = np.asarray(X, dtype=float)
    lo = np.array([np.broadcast_to(evaluate(l, X), X.shape[1:]) for l, _ in p.objectives])
    hi = np.array([np.broadcast_to(evaluate(u, X), X.shape[1:]) for _, u in p.objectives])
    return lo, hi


def eval_objectives(p: Problem, x) -> IntervalVector:
    x = _point(p, x)
    comps = []
    for i, (lower, upper) in enumerate(p.objectives):
        a, b = evaluate(lower, x), evaluate(upper, x)
        if a > b:
            raise IntervalError(f"interval order violated for objective {i + 1} at {x.tolist()}: {a} > {b}")
        comps.append(Interval(a, b))
    return IntervalVector(comps)


def constraint_values(p: Problem, X) -> np.ndarray:
    """g_t(x) for every grid t: shape (|T|,) for one point, (|T|, N) for a batch."""
    X = np.asarray(X, dtype=float)
    ts = p.t_grid()
    if p.constraint is None:
        return np.zeros((0,) + X.shape[1:])
    tt = ts.reshape((-1,) + (1,) * (X.ndim - 1))
    out = evaluate(p.constraint.expr, X, tt)
    return np.broadcast_to(out, (len(ts),) + X.shape[1:])


def feasible_mask(p: Problem, X, tol: float = FEAS_TOL) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    mask = p.omega.contains_batch(X)
    if p.constraint is not None:
        G = constraint_values(p, X)
        mask = mask & np.all(G <= tol, axis=0)
    return mask


def is_feasible(p: Problem, x, tol: float = FEAS_TOL) -> bool:
    x = _point(p, x)
    if not p.omega.contains(x):
        return False
    if p.constraint is None:
        return True
    return bool(np.all(constraint_values(p, x) <= tol))


def active_indices(p: Problem, x, tol: float = ACTIVE_TOL) -> list[float]:
    x = _point(p, x)
    if p.constraint is None:
        return []
    g = constraint_values(p, x)
    return [float(t) for t, v in zip(p.t_grid(), g) if abs(v) <= tol]


def check_standing_assumption(p: Problem, points: int = 11, span: float = 5.0) -> list:
    """Sample a grid and report points where lower_i(x) > upper_i(x)."""
    axes = [np.linspace(-span, span, points)] * p.n if p.n <= 3 else None
    if axes is not None:
        X = np.array(np.meshgrid(*axes, indexing="ij")).reshape(p.n, -1)
    else:
        X = np.random.default_rng(0).uniform(-span, span, size=(p.n, 2000))
    lo, hi = objective_arrays(p, X)
    bad = np.argwhere(lo > hi)
    return [(int(i), X[:, j].tolist()) for i, j in bad]


# ---------------------------------------------------------------- loading

def _num(v, where: str) -> float:
    try:
        if isinstance(v, str):
            if v.strip() in ("inf", "+inf"):
                return float("inf")
            if v.strip() == "-inf":
                return float("-inf")
            return float(Fraction(v.strip()))
        if isinstance(v, bool):
            raise TypeError
        return float(v)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ProblemError(f"expected a number, got {v!r}", where) from None


def _parse(text, n, where, param="t") -> Expr:
    if not isinstance(text, str):
        raise ProblemError(f"expected an expression string, got {text!r}", where)
    try:
        return parse_expr(text, n, param)
    except ExprError as exc:
        raise ProblemError(str(exc), where) from None


def problem_from_dict(data: dict, name: str = "") -> Problem:
    if not isinstance(data, dict):
        raise ProblemError("problem file must contain a JSON object")
    for key in ("n", "objectives", "epsilon"):
        if key not in data:
            raise ProblemError(f"missing field {key!r}")
    n = data["n"]
    if not isinstance(n, int) or n < 1:
        raise ProblemError("n must be a positive integer", "n")
    param = "t"
    constraint = None
    if data.get("constraint") is not None:
        c = data["constraint"]
        param = c.get("param", "t")
        tspec = c.get("T")
        if not isinstance(tspec, dict):
            raise ProblemError("missing index set", "constraint.T")
        if "range" in tspec:
            lo, hi = (_num(v, "constraint.T.range") for v in tspec["range"])
            count = tspec.get("grid", DEFAULT_T_GRID)
            if not isinstance(count, int):
                raise ProblemError("grid must be an integer", "constraint.T.grid")
            try:
                index_set = TRange(lo, hi, count)
            except ProblemError as exc:
                raise ProblemError(str(exc), "constraint.T") from None
        elif "list" in tspec:
            try:
                index_set = FiniteList(tuple(_num(v, "constraint.T.list") for v in tspec["list"]))
            except ProblemError as exc:
                raise ProblemError(str(exc), exc.location or "constraint.T.list") from None
        else:
            raise ProblemError("expected 'range' or 'list'", "constraint.T")
        if "expr" not in c:
            raise ProblemError("missing constraint expression", "constraint.expr")
        constraint = Constraint(param, index_set, _parse(c["expr"], n, "constraint.expr", param))
    objectives = []
    if not isinstance(data["objectives"], list) or not data["objectives"]:
        raise ProblemError("objectives must be a nonempty array", "objectives")
    for i, obj in enumerate(data["objectives"]):
        where = f"objectives[{i}]"
        if not isinstance(obj, dict) or "lower" not in obj or "upper" not in obj:
            raise ProblemError("expected {'lower': ..., 'upper': ...}", where)
        lower = _parse(obj["lower"], n, where + ".lower", param)
        upper = _parse(obj["upper"], n, where + ".upper", param)
        for side, e in (("lower", lower), ("upper", upper)):
            if e.uses_param:
                raise ProblemError("objectives may not use the constraint parameter", f"{where}.{side}")
        objectives.append((lower, upper))
    omega_spec = data.get("omega", {"type": "all"})
    kind = omega_spec.get("type")
    if kind == "all":
        omega = WholeSpace(n)
    elif kind == "box":
        lo = [_num(v, "omega.lo") for v in omega_spec.get("lo", [])]
        hi = [_num(v, "omega.hi") for v in omega_spec.get("hi", [])]
        if len(lo) != n or len(hi) != n:
            raise ProblemError(f"box bounds must have length {n}", "omega")
        try:
            omega = Box(tuple(lo), tuple(hi))
        except ProblemError as exc:
            raise ProblemError(str(exc), "omega") from None
    else:
        raise ProblemError(f"unsupported Omega type {kind!r} (use 'all' or 'box')", "omega.type")
    eps = []
    for i, pair in enumerate(data["epsilon"]):
        where = f"epsilon[{i}]"
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ProblemError("expected [lo, hi]", where)
        lo, hi = _num(pair[0], where), _num(pair[1], where)
        if lo < 0:
            raise ProblemError("epsilon lower endpoint must be nonnegative", where)
        try:
            eps.append(Interval(lo, hi))
        except IntervalError as exc:
            raise ProblemError(str(exc), where) from None
    if len(eps) != len(objectives):
        raise ProblemError(f"expected {len(objectives)} epsilon intervals, got {len(eps)}", "epsilon")
    p = Problem(n, tuple(objectives), constraint, omega, IntervalVector(eps),
                name=name or data.get("name", ""), source=data)
    bad = check_standing_assumption(p)
    if bad:
        i, x = bad[0]
        warnings.warn(f"lower > upper for objective {i + 1} at {x} ({len(bad)} sampled violations)",
                      StandingAssumptionWarning, stacklevel=2)
    return p


def load_problem(path) -> Problem:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProblemError(f"invalid JSON: {exc.msg}", f"{path.name}:{exc.lineno}:{exc.colno}") from None
    return problem_from_dict(data, name=path.stem)


FIXTURES = ("ex31", "ex32", "post32", "ex41")


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    return Path(str(resources.files("quasipareto") / "fixtures" / f"{name}.json"))


def load_fixture(name: str) -> Problem:
    return load_problem(fixture_path(name))
