"""
Tests for efcap Singular
Start asymptotics, Θ* refinement and convergence of regular solutions
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__)))

import math

import mpmath
import pytest

from core.errors import InvalidParamsError
from core.model import Params, compute_exponents
from core.singular import (asymptotic_decay_check, compute_theta_star, convergence_study, eventually_decreasing,
                           rescaled_distance, singular_residual, singular_start_values)


@pytest.fixture(scope="module")
def singular_n3_p7():
    return compute_theta_star(Params(3, 7.0))


class TestStartValues:
    def test_against_multiprecision_derivative(self):
        mpmath.mp.dps = 30
        for N, p in [(3, 7.0), (6, 3.0)]:
            exp = compute_exponents(Params(N, p))
            a, mu = mpmath.mpf(exp.a), mpmath.mpf(exp.mu)

            def U_star(theta):
                return a * mpmath.sec(theta / 2) ** (N - 2) * (2 * mpmath.tan(theta / 2)) ** (-mu)

            theta0 = 1e-3
            U0, dU0 = singular_start_values(Params(N, p), theta0)
            assert math.isclose(U0, float(U_star(theta0)), rel_tol=1e-13)
            assert math.isclose(dU0, float(mpmath.diff(U_star, theta0)), rel_tol=1e-12)

    def test_needs_supercritical(self):
        with pytest.raises(InvalidParamsError):
            singular_start_values(Params(3, 5.0), 1e-4)

    def test_rejects_large_start(self):
        with pytest.raises(InvalidParamsError):
            singular_start_values(Params(3, 7.0), 0.1)


class TestThetaStar:
    def test_refinement(self, singular_n3_p7):
        sing = singular_n3_p7
        assert sing.refinement_estimate < 1e-6
        assert len(sing.raw_zeros) == 3
        assert 0.0 < sing.Theta_star < math.pi
        assert math.isclose(sing.R_star, math.tan(0.5 * sing.Theta_star), rel_tol=1e-14)

    def test_residual(self, singular_n3_p7):
        assert singular_residual(singular_n3_p7) < 1e-6

    def test_decay_rate_near_pole(self, singular_n3_p7):
        exp = compute_exponents(Params(3, 7.0))
        rate = asymptotic_decay_check(singular_n3_p7, exp)
        assert abs(rate / (2.0 * exp.m) - 1.0) < 2e-2

    def test_summary_keys(self, singular_n3_p7):
        summary = singular_n3_p7.summary()
        assert {"Theta_star", "R_star", "refinement_estimate", "raw_zeros"} <= set(summary)


class TestConvergence:
    def test_regular_solutions_approach_singular(self, singular_n3_p7):
        params = Params(3, 7.0)
        study = convergence_study(params, [1e2, 1e3, 1e5], singular=singular_n3_p7)
        assert study.records[-1].zero_gap < 1e-2
        assert study.records[-1].sup_distance < study.records[0].sup_distance

    def test_rejects_unsorted_gammas(self, singular_n3_p7):
        with pytest.raises(InvalidParamsError):
            convergence_study(Params(3, 7.0), [1e3, 1e1], singular=singular_n3_p7)

    def test_blow_up_rescaling(self):
        params = Params(3, 7.0)
        near, far = rescaled_distance(params, 10.0), rescaled_distance(params, 1e3)
        assert far < near
        # well above the integrator noise floor, so the decrease is resolved
        assert near > 1e-8


def test_eventually_decreasing():
    assert eventually_decreasing([5.0, 1.0, 3.0, 2.0, 1.0])
    assert not eventually_decreasing([3.0, 2.0, 2.5])
    assert eventually_decreasing([1.0, 0.5], tail=3)
