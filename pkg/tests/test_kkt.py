import json
import math

import numpy as np
import pytest

from conftest import random_singleton_system, vertex_lp_member
from quasipareto.kkt import (MultiplierCertificate, build_kkt_system, certificate_problems,
                             certificate_residual, solve_kkt, verify_certificate)
from quasipareto.problem import load_fixture
from quasipareto.reports import stated_certificate_post32


def test_example_31_origin():
    sys = build_kkt_system(load_fixture("ex31"), [0.0, 0.0])
    cert = solve_kkt(sys)
    assert cert.certified and cert.residual <= 1e-8
    assert abs(math.fsum(cert.lambdas()) - 1.0) <= 1e-12
    assert verify_certificate(sys, cert)


def test_post32_stated_multipliers_give_exact_zero():
    sys, cert = stated_certificate_post32(load_fixture("post32"))
    assert cert.residual == 0.0
    assert verify_certificate(sys, cert)


def test_post32_solver_certificate():
    sys = build_kkt_system(load_fixture("post32"), [0.0])
    cert = solve_kkt(sys)
    assert cert.residual <= 1e-10 and verify_certificate(sys, cert)


def test_example_41_not_certified():
    cert = solve_kkt(build_kkt_system(load_fixture("ex41"), [1.0]))
    assert not cert.certified and cert.enumeration == "COMPLETE"


def test_round_trip_and_tamper_detection():
    sys = build_kkt_system(load_fixture("post32"), [0.0])
    cert = solve_kkt(sys)
    again = MultiplierCertificate.from_json(json.loads(cert.dumps()))
    assert verify_certificate(sys, again)
    again.lambdaL = [again.lambdaL[0] + 0.25]
    assert any("lambda sum" in msg for msg in certificate_problems(sys, again))
    with pytest.raises(ValueError, match="malformed certificate"):
        MultiplierCertificate.from_json({"lambdaL": [1.0]})


def test_residual_is_order_independent():
    sys, cert = stated_certificate_post32(load_fixture("post32"))
    assert certificate_residual(sys, cert) == certificate_residual(sys, cert, reverse=True)


def test_fixed_multipliers():
    sys = build_kkt_system(load_fixture("post32"), [0.0])
    fixed_mu = [1.0 if t == 0.5 else 0.0 for t in sys.t_values]
    assert solve_kkt(sys, fixed_lambda=[0.5, 0.5], fixed_mu=fixed_mu).certified
    # with mu frozen at zero the epsilon ball (radius 2/3) still absorbs the gradient 1/2
    assert solve_kkt(sys, fixed_lambda=[0.5, 0.5], fixed_mu=[0.0] * len(sys.t_values)).certified
    sys41 = build_kkt_system(load_fixture("ex41"), [1.0])
    assert not solve_kkt(sys41, fixed_lambda=[0.5, 0.5], fixed_mu=[0.0] * len(sys41.t_values)).certified


def test_infeasible_point_rejected():
    with pytest.raises(ValueError):
        build_kkt_system(load_fixture("ex41"), [-1.0])


def test_singleton_systems_match_vertex_lp():
    rng = np.random.default_rng(8)
    for _ in range(20):
        sys = random_singleton_system(rng)
        assert solve_kkt(sys).certified == vertex_lp_member(sys)
