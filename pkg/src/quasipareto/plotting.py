"""Static plots of interval objectives and witness sets (n <= 2)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .pareto import SolutionType, dominance_mask, grid_points  # noqa: E402
from .problem import Problem, feasible_mask, objective_arrays  # noqa: E402


def plot_problem(p: Problem, box, steps: int, out_dir: Path, xbar=None,
                 stype: SolutionType = SolutionType.T2QW, fmt: str = "png") -> list[Path]:
    """One figure per objective with both endpoint functions; a witness scatter when ``xbar`` is given."""
    out_dir = Path(out_dir)
    X = grid_points(box, steps)
    FL, FU = objective_arrays(p, X)
    paths = []
    for i in range(p.m):
        fig = plt.figure(figsize=(6, 4.5))
        if p.n == 1:
            ax = fig.add_subplot()
            ax.plot(X[0], FL[i], label=f"lower f{i + 1}")
            ax.plot(X[0], FU[i], label=f"upper f{i + 1}", linestyle="--")
            ax.set_xlabel("x")
            ax.legend()
        else:
            ax = fig.add_subplot(projection="3d")
            shape = (steps, steps)
            A, B = X[0].reshape(shape), X[1].reshape(shape)
            ax.plot_surface(A, B, FL[i].reshape(shape), alpha=0.6, cmap="viridis")
            ax.plot_surface(A, B, FU[i].reshape(shape), alpha=0.4, cmap="magma")
            ax.set_xlabel("x1")
            ax.set_ylabel("x2")
        ax.set_title(f"{p.name}: lower and upper objective {i + 1}")
        path = out_dir / f"{p.name or 'problem'}_f{i + 1}.{fmt}"
        fig.savefig(path)
        plt.close(fig)
        paths.append(path)
    if xbar is not None:
        feas = feasible_mask(p, X)
        hits = feas & dominance_mask(p, xbar, X, stype)
        fig, ax = plt.subplots(figsize=(5, 5))
        ys = X[1] if p.n == 2 else np.zeros(X.shape[1])
        ax.scatter(X[0][feas & ~hits], ys[feas & ~hits], s=4, c="lightgray", label="feasible")
        ax.scatter(X[0][hits], ys[hits], s=6, c="crimson", label=f"{stype.value} witnesses")
        ax.scatter([xbar[0]], [xbar[1] if p.n == 2 else 0.0], marker="*", s=120, c="black", label="anchor")
        ax.legend(loc="best")
        ax.set_title(f"{p.name}: points dominating the anchor")
        path = out_dir / f"{p.name or 'problem'}_witnesses_{stype.value}.{fmt}"
        fig.savefig(path)
        plt.close(fig)
        paths.append(path)
    return paths
