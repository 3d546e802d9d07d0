"""Limiting subdifferentials of restricted-grammar expressions.

A :class:`SubdiffSet` is a finite union of ``conv(vertices) + radius * B``
terms (or, with ``hull=True``, the convex hull of that union). Every set
carries an exactness flag: ``EXACT`` when each calculus rule used is known to
give the limiting subdifferential itself, ``SUPERSET`` when only an inclusion
is guaranteed.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .expr import Add, Call, Div, Expr, Kind, Mul, Neg, Node, Pow, const_value, smooth_gradient

ACTIVITY_TOL = 1e-9
COINCIDE_TOL = 1e-9


class Exactness(enum.Enum):
    EXACT = "EXACT"
    SUPERSET = "SUPERSET"

    def __and__(self, other: Exactness) -> Exactness:
        if self is Exactness.EXACT and other is Exactness.EXACT:
            return Exactness.EXACT
        return Exactness.SUPERSET


@dataclass(frozen=True, eq=False)
class SubdiffTerm:
    vertices: np.ndarray  # shape (k, n)
    radius: float = 0.0

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.shape[0] == 0:
            raise ValueError("subdifferential term needs at least one vertex")
        if not self.radius >= 0:
            raise ValueError(f"negative ball radius {self.radius}")
        object.__setattr__(self, "vertices", v)

    @property
    def is_point(self) -> bool:
        return self.vertices.shape[0] == 1 and self.radius == 0

    def lex_min_vertex(self) -> np.ndarray:
        order = np.lexsort(self.vertices.T[::-1])
        return self.vertices[order[0]].copy()

    def __repr__(self) -> str:
        verts = np.array2string(self.vertices, precision=6, separator=", ")
        return f"SubdiffTerm({verts}, r={self.radius:g})"


@dataclass(frozen=True, eq=False)
class SubdiffSet:
    terms: tuple[SubdiffTerm, ...]
    exactness: Exactness = Exactness.EXACT
    hull: bool = False

    def __post_init__(self):
        if not self.terms:
            raise ValueError("subdifferential set needs at least one term")
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def point(cls, g, exactness=Exactness.EXACT) -> SubdiffSet:
        return cls((SubdiffTerm(np.asarray(g, dtype=float).reshape(1, -1)),), exactness)

    @property
    def dim(self) -> int:
        return self.terms[0].vertices.shape[1]

    @property
    def is_singleton(self) -> bool:
        return len(self.terms) == 1 and self.terms[0].is_point

    @property
    def exact(self) -> bool:
        return self.exactness is Exactness.EXACT

    def all_vertices(self) -> np.ndarray:
        return np.vstack([t.vertices for t in self.terms])

    def max_radius(self) -> float:
        return max(t.radius for t in self.terms)

    def first_selection(self) -> np.ndarray:
        """Lexicographically smallest vertex of the first term (deterministic pick)."""
        return self.terms[0].lex_min_vertex()

    def __add__(self, other: SubdiffSet) -> SubdiffSet:
        return minkowski_sum(self, other)

    def __repr__(self) -> str:
        kind = "hull" if self.hull else "union"
        return f"SubdiffSet({kind} of {list(self.terms)}, {self.exactness.value})"


def _reduce_vertices(v: np.ndarray) -> np.ndarray:
    v = np.unique(v, axis=0)
    if v.shape[0] <= 2:
        return v
    if v.shape[1] == 1:
        return np.array([[v.min()], [v.max()]])
    try:
        hull = ConvexHull(v)
    except (QhullError, ValueError):
        return v
    return v[np.sort(hull.vertices)]


def minkowski_sum(a: SubdiffSet, b: SubdiffSet) -> SubdiffSet:
    if a.hull or b.hull:
        raise ValueError("Minkowski sums are defined for union-form sets only")
    terms = []
    for ta, tb in itertools.product(a.terms, b.terms):
        verts = (ta.vertices[:, None, :] + tb.vertices[None, :, :]).reshape(-1, a.dim)
        terms.append(SubdiffTerm(_reduce_vertices(verts), ta.radius + tb.radius))
    return SubdiffSet(tuple(terms), a.exactness & b.exactness)


def _essential(grads: np.ndarray) -> list[int]:
    """Indices l whose linearization can be the strict minimum in some direction."""
    p, n = grads.shape
    if p <= 2:
        return list(range(p))
    keep = []
    for l in range(p):
        others = [k for k in range(p) if k != l]
        # max s  s.t. (g_l - g_k).d + s <= 0, -1 <= d <= 1
        A = np.hstack([grads[l] - grads[others], np.ones((len(others), 1))])
        c = np.zeros(n + 1)
        c[-1] = -1.0
        res = linprog(c, A_ub=A, b_ub=np.zeros(len(others)),
                      bounds=[(-1, 1)] * n + [(None, 1)], method="highs")
        if res.status == 0 and -res.fun > 1e-12:
            keep.append(l)
    return keep


def _dedupe(points: Sequence[np.ndarray]) -> tuple[list[np.ndarray], bool]:
    out: list[np.ndarray] = []
    collided = False
    for p in points:
        if any(np.max(np.abs(p - q)) <= COINCIDE_TOL for q in out):
            collided = True
            continue
        out.append(p)
    return out, collided


def _union_of(points, exact=True) -> SubdiffSet:
    pts, collided = _dedupe(points)
    ex = Exactness.EXACT if exact and not collided else Exactness.SUPERSET
    return SubdiffSet(tuple(SubdiffTerm(p.reshape(1, -1)) for p in pts), ex)


def _hull_of(points) -> SubdiffSet:
    verts = _reduce_vertices(np.vstack([np.reshape(p, (1, -1)) for p in points]))
    return SubdiffSet((SubdiffTerm(verts),), Exactness.EXACT)


def _atom_subdiff(node: Call, coef: float, x: np.ndarray, t) -> SubdiffSet:
    n = x.shape[0]
    if node.name in ("max", "min"):
        parts = [smooth_gradient(a, x, t) for a in node.args]
        vals = np.array([p[0] for p in parts])
        grads = np.array([p[1] for p in parts])
        top = vals.max() if node.name == "max" else vals.min()
        if node.name == "max":
            active = [l for l in range(len(vals)) if vals[l] >= top - ACTIVITY_TOL]
        else:
            active = [l for l in range(len(vals)) if vals[l] <= top + ACTIVITY_TOL]
        g = coef * grads[active]
        if len(active) == 1:
            return SubdiffSet.point(g[0])
        # c*max with c > 0 and c*min with c < 0 are max-type: convex hull of active gradients.
        convex_type = (node.name == "max") == (coef > 0)
        if convex_type:
            return _hull_of(list(g))
        # min-type: union over essentially active gradients
        pts, collided = _dedupe(list(g))
        pts = np.array(pts)
        keep = _essential(pts)
        return _union_of([pts[l] for l in keep], exact=not collided)
    if node.name == "abs":
        u, gu = smooth_gradient(node.args[0], x, t)
        if abs(u) > ACTIVITY_TOL:
            return SubdiffSet.point(coef * np.sign(u) * gu)
        if coef > 0:
            return _hull_of([coef * gu, -coef * gu])
        return _union_of([coef * gu, -coef * gu])
    if node.name == "norm":
        parts = [smooth_gradient(a, x, t) for a in node.args]
        a = np.array([p[0] for p in parts])
        J = np.array([p[1] for p in parts]).reshape(len(parts), n)
        r = float(np.sqrt(np.sum(a * a)))
        if r > ACTIVITY_TOL:
            return SubdiffSet.point(coef * (J.T @ a) / r)
        spec = float(np.linalg.norm(J, 2)) if J.size else 0.0
        isometric = J.shape[0] >= n and np.allclose(J.T @ J, np.eye(n), atol=1e-12, rtol=0)
        ex = Exactness.EXACT if (coef > 0 and isometric) else Exactness.SUPERSET
        return SubdiffSet((SubdiffTerm(np.zeros((1, n)), abs(coef) * spec),), ex)
    raise ValueError(f"unsupported atom {node.name}")


def _split(node: Node, coef: float, x, t, smooth: list, atoms: list):
    if coef == 0 or node.kind is Kind.CONST:
        return
    if node.kind is Kind.SMOOTH:
        smooth.append((coef, node))
        return
    n = x.shape[0]
    if isinstance(node, Add):
        for c in node.terms:
            _split(c, coef, x, t, smooth, atoms)
    elif isinstance(node, Neg):
        _split(node.arg, -coef, x, t, smooth, atoms)
    elif isinstance(node, Mul):
        k = coef
        inner = None
        for f in node.factors:
            if f.kind is Kind.CONST:
                k *= const_value(f, t, n)
            else:
                inner = f
        _split(inner, k, x, t, smooth, atoms)
    elif isinstance(node, Div):
        _split(node.num, coef / const_value(node.den, t, n), x, t, smooth, atoms)
    elif isinstance(node, Pow):
        _split(node.base, coef, x, t, smooth, atoms)  # exponent is 1 here
    elif isinstance(node, Call):
        atoms.append((coef, node))
    else:
        raise TypeError(f"unexpected node {node!r}")


def limiting_subdiff(expr: Expr, x, t=None) -> SubdiffSet:
    """Limiting subdifferential of ``expr`` at ``x`` (or a flagged superset of it).

    At points where every nonsmooth atom is locally smooth the result is the
    singleton gradient. Atoms that are genuinely kinked at ``x`` combine by the
    sum rule; the result is ``EXACT`` only when those atoms depend on pairwise
    disjoint variable sets.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != expr.n:
        raise ValueError(f"point has dimension {x.shape[0]}, expected {expr.n}")
    smooth: list = []
    atoms: list = []
    _split(expr.root, 1.0, x, t, smooth, atoms)
    g0 = np.zeros(expr.n)
    for c, node in smooth:
        g0 = g0 + c * smooth_gradient(node, x, t)[1]
    total = SubdiffSet.point(g0)
    kinked_vars: list[frozenset] = []
    disjoint = True
    for coef, node in atoms:
        s = _atom_subdiff(node, coef, x, t)
        if not s.is_singleton:
            if any(node.variables & v for v in kinked_vars):
                disjoint = False
            kinked_vars.append(node.variables)
        total = total + s
    if not disjoint:
        total = SubdiffSet(total.terms, Exactness.SUPERSET)
    return total
