"""Expression language for objective and constraint functions.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = ("-" | "+") unary | power ;
    power   = atom [ ("^" | "**") integer ] ;
    atom    = number | ident | func "(" expr { "," expr } ")" | "(" expr ")" ;
    func    = "abs" | "max" | "min" | "norm" ;
    ident   = "x1" ... "xn" | "x" (only when n = 1) | parameter name ;
    number  = decimal literal ;   (p/q rationals parse as constant division)

Restrictions checked at parse time, so that every expression has a
computable limiting subdifferential:

* arguments of ``abs``, ``max``, ``min`` and ``norm`` contain no nonsmooth node;
* ``norm`` arguments are affine in x;
* products and powers of a nonsmooth node are only allowed with x-free factors
  (so ``t*abs(x1)`` is fine, ``abs(x1)*x2`` is not);
* division only by x-free expressions.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import reduce

import numpy as np


class Kind(enum.IntEnum):
    CONST = 0  # free of x (may contain the parameter)
    SMOOTH = 1
    NONSMOOTH = 2


class ExprError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int | None = None):
        self.message = message
        self.text = text
        self.pos = pos
        super().__init__(self._render())

    def _render(self) -> str:
        if self.pos is None or not self.text:
            return self.message
        return f"{self.message} at column {self.pos + 1}\n  {self.text}\n  {' ' * self.pos}^"


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifierError(ExprError):
    pass


class NonsmoothCompositionError(ExprError):
    pass


class EvaluationError(ValueError):
    pass


FUNCTIONS = ("abs", "max", "min", "norm")


# ---------------------------------------------------------------- nodes

@dataclass(frozen=True, eq=False)
class Node:
    pos: int = field(default=0, compare=False, repr=False)

    kind: Kind = field(init=False, default=Kind.CONST, compare=False, repr=False)
    affine: bool = field(init=False, default=True, compare=False, repr=False)
    variables: frozenset = field(init=False, default=frozenset(), compare=False, repr=False)

    def _set(self, kind, affine, variables):
        object.__setattr__(self, "kind", Kind(kind))
        object.__setattr__(self, "affine", affine)
        object.__setattr__(self, "variables", frozenset(variables))

    def children(self) -> tuple:
        return ()


@dataclass(frozen=True, eq=False)
class Const(Node):
    value: float = 0.0

    def __post_init__(self):
        self._set(Kind.CONST, True, ())


@dataclass(frozen=True, eq=False)
class Var(Node):
    index: int = 0  # zero based

    def __post_init__(self):
        self._set(Kind.SMOOTH, True, (self.index,))


@dataclass(frozen=True, eq=False)
class Param(Node):
    name: str = "t"

    def __post_init__(self):
        self._set(Kind.CONST, True, ())


def _union_vars(nodes):
    return frozenset().union(*(c.variables for c in nodes)) if nodes else frozenset()


@dataclass(frozen=True, eq=False)
class Neg(Node):
    arg: Node = None

    def __post_init__(self):
        self._set(self.arg.kind, self.arg.affine, self.arg.variables)

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class Add(Node):
    terms: tuple = ()

    def __post_init__(self):
        self._set(max(c.kind for c in self.terms), all(c.affine for c in self.terms),
                  _union_vars(self.terms))

    def children(self):
        return self.terms


@dataclass(frozen=True, eq=False)
class Mul(Node):
    factors: tuple = ()

    def __post_init__(self):
        nonconst = [f for f in self.factors if f.kind is not Kind.CONST]
        rough = [f for f in self.factors if f.kind is Kind.NONSMOOTH]
        if rough and len(nonconst) > 1:
            raise NonsmoothCompositionError(
                "nonsmooth-composition: a nonsmooth factor may only be multiplied by x-free factors",
                pos=rough[0].pos)
        kind = max((f.kind for f in self.factors), default=Kind.CONST)
        affine = len(nonconst) == 0 or (len(nonconst) == 1 and nonconst[0].affine)
        self._set(kind, affine, _union_vars(self.factors))

    def children(self):
        return self.factors


@dataclass(frozen=True, eq=False)
class Div(Node):
    num: Node = None
    den: Node = None

    def __post_init__(self):
        if self.den.kind is not Kind.CONST:
            raise NonsmoothCompositionError(
                "division is only allowed by x-free expressions", pos=self.den.pos)
        self._set(self.num.kind, self.num.affine, self.num.variables)

    def children(self):
        return (self.num, self.den)


@dataclass(frozen=True, eq=False)
class Pow(Node):
    base: Node = None
    exponent: int = 1

    def __post_init__(self):
        k = self.exponent
        if self.base.kind is Kind.NONSMOOTH and k >= 2:
            raise NonsmoothCompositionError(
                "nonsmooth-composition: integer power of a nonsmooth expression", pos=self.base.pos)
        if k == 0:
            self._set(Kind.CONST, True, ())
            return
        affine = self.base.affine if k == 1 else self.base.kind is Kind.CONST
        self._set(self.base.kind, affine, self.base.variables)

    def children(self):
        return (self.base,)


@dataclass(frozen=True, eq=False)
class Call(Node):
    name: str = "abs"
    args: tuple = ()

    def __post_init__(self):
        for a in self.args:
            if a.kind is Kind.NONSMOOTH:
                raise NonsmoothCompositionError(
                    f"nonsmooth-composition: argument of {self.name}() must be smooth", pos=a.pos)
        if self.name == "norm":
            for a in self.args:
                if not a.affine:
                    raise NonsmoothCompositionError(
                        "norm() arguments must be affine in x", pos=a.pos)
        if all(a.kind is Kind.CONST for a in self.args):
            self._set(Kind.CONST, True, ())
        else:
            self._set(Kind.NONSMOOTH, False, _union_vars(self.args))

    def children(self):
        return self.args


# ---------------------------------------------------------------- parser

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<id>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^(),])
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, n: int, param: str):
        self.text = text
        self.n = n
        self.param = param
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.take()
        if tok[1] != value:
            found = tok[1] or "end of input"
            raise ExprSyntaxError(f"expected {value!r}, found {found!r}", self.text, tok[2])
        return tok

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected token {tok[1]!r}", self.text, tok[2])
        return node

    def expr(self) -> Node:
        start = self.peek()[2]
        terms = [self.term()]
        while self.peek()[1] in ("+", "-"):
            op = self.take()
            rhs = self.term()
            terms.append(rhs if op[1] == "+" else Neg(pos=op[2], arg=rhs))
        return terms[0] if len(terms) == 1 else Add(pos=start, terms=tuple(terms))

    def term(self) -> Node:
        start = self.peek()[2]
        node = self.unary()
        factors = [node]
        while self.peek()[1] in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op[1] == "*":
                factors.append(rhs)
            else:
                lhs = factors[0] if len(factors) == 1 else Mul(pos=start, factors=tuple(factors))
                factors = [Div(pos=start, num=lhs, den=rhs)]
        return factors[0] if len(factors) == 1 else Mul(pos=start, factors=tuple(factors))

    def unary(self) -> Node:
        tok = self.peek()
        if tok[1] == "-":
            self.take()
            return Neg(pos=tok[2], arg=self.unary())
        if tok[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        tok = self.peek()
        if tok[1] in ("^", "**"):
            self.take()
            exp_tok = self.take()
            paren = exp_tok[1] == "("
            if paren:
                exp_tok = self.take()
            if exp_tok[0] != "num" or not exp_tok[1].isdigit():
                raise ExprSyntaxError("exponent must be a nonnegative integer literal",
                                      self.text, exp_tok[2])
            if paren:
                self.expect(")")
            try:
                return Pow(pos=base.pos, base=base, exponent=int(exp_tok[1]))
            except ExprError as exc:
                raise type(exc)(exc.message, self.text, exc.pos) from None
        return base

    def atom(self) -> Node:
        kind, value, pos = self.take()
        if kind == "num":
            return Const(pos=pos, value=float(value))
        if kind == "id":
            if self.peek()[1] == "(":
                return self.call(value, pos)
            return self.ident(value, pos)
        if value == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected token {value or 'end of input'!r}", self.text, pos)

    def ident(self, name: str, pos: int) -> Node:
        if name == self.param:
            return Param(pos=pos, name=name)
        m = re.fullmatch(r"x(\d+)", name)
        if m:
            j = int(m.group(1))
            if 1 <= j <= self.n:
                return Var(pos=pos, index=j - 1)
            raise UnknownIdentifierError(f"variable {name} out of range 1..{self.n}", self.text, pos)
        if name == "x" and self.n == 1:
            return Var(pos=pos, index=0)
        raise UnknownIdentifierError(f"unknown identifier {name!r}", self.text, pos)

    def call(self, name: str, pos: int) -> Node:
        if name not in FUNCTIONS:
            raise UnknownIdentifierError(f"unknown function {name!r}", self.text, pos)
        self.expect("(")
        args = [self.expr()]
        while self.peek()[1] == ",":
            self.take()
            args.append(self.expr())
        self.expect(")")
        if name == "abs" and len(args) != 1:
            raise ExprSyntaxError("abs() takes exactly one argument", self.text, pos)
        try:
            return Call(pos=pos, name=name, args=tuple(args))
        except ExprError as exc:
            raise type(exc)(exc.message, self.text, exc.pos) from None


def _wrap_build_errors(fn):
    def inner(self, *a, **kw):
        try:
            return fn(self, *a, **kw)
        except ExprError as exc:
            if exc.text:
                raise
            raise type(exc)(exc.message, self.text, exc.pos) from None
    return inner


for _name in ("expr", "term", "unary"):
    setattr(_Parser, _name, _wrap_build_errors(getattr(_Parser, _name)))


# ---------------------------------------------------------------- Expr

@dataclass(frozen=True, eq=False)
class Expr:
    """A parsed, validated expression in x1..xn and an optional parameter."""

    root: Node
    n: int
    text: str = ""
    param: str = "t"

    @property
    def kind(self) -> Kind:
        return self.root.kind

    @property
    def is_smooth(self) -> bool:
        return self.root.kind <= Kind.SMOOTH

    @property
    def uses_param(self) -> bool:
        return _uses_param(self.root)

    def __call__(self, x, t=None):
        return evaluate(self, x, t)

    def __repr__(self) -> str:
        return f"Expr({self.text!r}, n={self.n})"


def _uses_param(node: Node) -> bool:
    return isinstance(node, Param) or any(_uses_param(c) for c in node.children())


def parse_expr(text: str, n: int, param: str = "t") -> Expr:
    if n < 1:
        raise ValueError("dimension n must be >= 1")
    root = _Parser(text, n, param).parse()
    return Expr(root=root, n=n, text=text, param=param)


# ---------------------------------------------------------------- evaluation

def _as_points(expr: Expr, x) -> np.ndarray:
    X = np.asarray(x, dtype=float)
    if X.ndim == 0:
        X = X.reshape(1)
    if X.shape[0] != expr.n:
        raise EvaluationError(f"point has dimension {X.shape[0]}, expected {expr.n}")
    return X


def _ev(node: Node, X: np.ndarray, t):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return X[node.index]
    if isinstance(node, Param):
        if t is None:
            raise EvaluationError(f"missing value for parameter {node.name!r}")
        return t
    if isinstance(node, Neg):
        return -_ev(node.arg, X, t)
    if isinstance(node, Add):
        vals = [_ev(c, X, t) for c in node.terms]
        return reduce(lambda a, b: a + b, vals)
    if isinstance(node, Mul):
        vals = [_ev(c, X, t) for c in node.factors]
        return reduce(lambda a, b: a * b, vals)
    if isinstance(node, Div):
        den = _ev(node.den, X, t)
        if np.any(np.asarray(den) == 0):
            raise EvaluationError("division by zero")
        return _ev(node.num, X, t) / den
    if isinstance(node, Pow):
        base = _ev(node.base, X, t)
        if node.exponent == 0:
            return np.ones_like(base) if isinstance(base, np.ndarray) else 1.0
        out = base
        for _ in range(node.exponent - 1):
            out = out * base
        return out
    if isinstance(node, Call):
        vals = [_ev(a, X, t) for a in node.args]
        if node.name == "abs":
            return np.abs(vals[0])
        if node.name == "max":
            return reduce(np.maximum, vals)
        if node.name == "min":
            return reduce(np.minimum, vals)
        if node.name == "norm":
            return np.sqrt(reduce(lambda a, b: a + b, [v * v for v in vals]))
    raise TypeError(f"unknown node {node!r}")


def evaluate(expr: Expr, x, t=None):
    """Evaluate at one point (shape ``(n,)``) or a batch (shape ``(n, ...)``).

    ``t`` may be a scalar or an array broadcasting against the batch shape.
    Returns a float for a single point, an ndarray for batches.
    """
    X = _as_points(expr, x)
    if t is None and expr.uses_param:
        raise EvaluationError(f"missing value for parameter {expr.param!r}")
    val = _ev(expr.root, X, t)
    batch = X.shape[1:]
    val = np.broadcast_to(np.asarray(val, dtype=float), np.broadcast_shapes(batch, np.shape(val)))
    if not np.all(np.isfinite(val)):
        raise EvaluationError(f"non-finite value of {expr.text!r}")
    if val.ndim == 0:
        return float(val)
    return np.array(val)


def _grad(node: Node, x: np.ndarray, t) -> tuple[float, np.ndarray]:
    n = x.shape[0]
    if node.kind is Kind.CONST:
        return float(_ev(node, x, t)), np.zeros(n)
    if isinstance(node, Var):
        g = np.zeros(n)
        g[node.index] = 1.0
        return float(x[node.index]), g
    if isinstance(node, Neg):
        v, g = _grad(node.arg, x, t)
        return -v, -g
    if isinstance(node, Add):
        parts = [_grad(c, x, t) for c in node.terms]
        return sum(p[0] for p in parts), sum(p[1] for p in parts)
    if isinstance(node, Mul):
        parts = [_grad(c, x, t) for c in node.factors]
        val = 1.0
        for p in parts:
            val *= p[0]
        g = np.zeros(n)
        for k, (_, gk) in enumerate(parts):
            other = 1.0
            for j, p in enumerate(parts):
                if j != k:
                    other *= p[0]
            g = g + other * gk
        return val, g
    if isinstance(node, Div):
        v, g = _grad(node.num, x, t)
        d = float(_ev(node.den, x, t))
        if d == 0:
            raise EvaluationError("division by zero")
        return v / d, g / d
    if isinstance(node, Pow):
        v, g = _grad(node.base, x, t)
        k = node.exponent
        return v ** k, k * v ** (k - 1) * g
    raise EvaluationError(f"gradient requested for nonsmooth node {type(node).__name__}")


def smooth_gradient(node_or_expr, x, t=None) -> tuple[float, np.ndarray]:
    """Value and analytic gradient of a smooth (or x-free) subtree at one point."""
    node = node_or_expr.root if isinstance(node_or_expr, Expr) else node_or_expr
    x = np.asarray(x, dtype=float).reshape(-1)
    return _grad(node, x, t)


def fd_gradient(expr: Expr, x, h: float = 1e-6, t=None) -> np.ndarray:
    """Central-difference gradient, used as an independent oracle in tests."""
    x = np.asarray(x, dtype=float).reshape(-1)
    g = np.zeros(expr.n)
    for j in range(expr.n):
        e = np.zeros(expr.n)
        e[j] = h
        g[j] = (evaluate(expr, x + e, t) - evaluate(expr, x - e, t)) / (2 * h)
    return g


def walk(node: Node):
    yield node
    for c in node.children():
        yield from walk(c)


def const_value(node: Node, t, n: int) -> float:
    """Value of an x-free node."""
    return float(_ev(node, np.zeros(n), t))
