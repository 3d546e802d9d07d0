"""Approximate quasi Pareto solutions of interval-valued semi-infinite multiobjective problems."""

from .interval import Interval, IntervalVector, LU, VecLU, lu_compare, vec_relation
from .problem import Problem, load_fixture, load_problem
from .pareto import SolutionType, beats, falsify_on_grid, inclusion_audit
from .scalarize import make_phi, phi_value, qw_oracle
from .kkt import MultiplierCertificate, build_kkt_system, solve_kkt, verify_certificate
from .convexity import ConvexityClass, audit_class, default_samples
from .duality import (DualPoint, converse_duality_check, is_dual_feasible, lagrange_value,
                      strong_duality_pipeline, weak_duality_check)

__all__ = [
    "Interval", "IntervalVector", "LU", "VecLU", "lu_compare", "vec_relation",
    "Problem", "load_fixture", "load_problem",
    "SolutionType", "beats", "falsify_on_grid", "inclusion_audit",
    "make_phi", "phi_value", "qw_oracle",
    "MultiplierCertificate", "build_kkt_system", "solve_kkt", "verify_certificate",
    "ConvexityClass", "audit_class", "default_samples",
    "DualPoint", "converse_duality_check", "is_dual_feasible", "lagrange_value",
    "strong_duality_pipeline", "weak_duality_check",
]
