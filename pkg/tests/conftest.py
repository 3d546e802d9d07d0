import numpy as np
import pytest

from quasipareto.problem import problem_from_dict

# Lines printed by test_acceptance.py, echoed once more in the terminal summary.
ACCEPTANCE_LINES = {}


def random_problem(rng, n=None, m=None, finite_t=True, convex=False, name="rand"):
    """A random well-formed problem: quadratic objectives, affine-in-x constraints."""
    n = n or int(rng.integers(1, 3))
    m = m or int(rng.integers(1, 3))
    names = ["x"] if n == 1 else [f"x{j + 1}" for j in range(n)]

    def num(v):
        return repr(round(float(v), 3))

    objectives, eps = [], []
    for _ in range(m):
        a = rng.uniform(0.2, 2.0, n) if convex else rng.uniform(-1.0, 2.0, n)
        c = rng.uniform(-1, 1, n)
        b = rng.uniform(-1, 1, n)
        lower = " + ".join(f"{num(a[j])}*({names[j]} - {num(c[j])})^2 + {num(b[j])}*{names[j]}" for j in range(n))
        spread = " + ".join(f"{num(abs(s))}*{names[j]}^2" for j, s in enumerate(rng.uniform(0, 0.5, n)))
        upper = f"{lower} + {spread} + {num(rng.uniform(0, 1))}"
        objectives.append({"lower": lower, "upper": upper})
        lo = rng.uniform(0, 0.5)
        eps.append([num(lo), num(lo + rng.uniform(0, 0.5))])
    data = {"name": name, "n": n, "objectives": objectives, "epsilon": eps, "omega": {"type": "all"}}
    k = int(rng.integers(1, 6))
    if finite_t:
        ts = sorted(set(round(float(v), 3) for v in rng.uniform(0, 1, k)))
        coef = rng.uniform(-1, 1, n)
        terms = " + ".join(f"({num(coef[j])} + t)*{names[j]}" for j in range(n))
        data["constraint"] = {"param": "t", "T": {"list": ts}, "expr": f"{terms} - 2"}
    return problem_from_dict(data)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


def random_singleton_system(rng):
    """All-singleton multiplier system with zero epsilon and N = {0}."""
    from quasipareto.kkt import KKTSystem
    from quasipareto.problem import OrthantCone
    from quasipareto.subdiff import SubdiffSet

    n = int(rng.integers(1, 3))
    m = int(rng.integers(1, 3))
    k = int(rng.integers(0, 4))
    branch = tuple(SubdiffSet.point(np.round(rng.normal(size=n), 3)) for _ in range(2 * m))
    g = tuple(SubdiffSet.point(np.round(rng.normal(size=n), 3)) for _ in range(k))
    ts = tuple(float(j) / 4 for j in range(k))
    return KKTSystem(n, m, np.zeros(n), branch, tuple((0.0, 0.0) for _ in range(m)), ts, g,
                     OrthantCone(("zero",) * n))


def vertex_lp_member(sys):
    """Independent test: is 0 = sum lambda_b a_b + sum mu_t c_t with lambda in the simplex, mu >= 0?"""
    from scipy.optimize import linprog

    A = np.array([s.terms[0].vertices[0] for s in sys.branch_sets + sys.g_sets]).T
    nb = len(sys.branch_sets)
    ones = np.r_[np.ones(nb), np.zeros(A.shape[1] - nb)]
    res = linprog(np.zeros(A.shape[1]), A_eq=np.vstack([A, ones]), b_eq=np.r_[np.zeros(sys.n), 1.0],
                  bounds=[(0, None)] * A.shape[1], method="highs")
    return res.status == 0
