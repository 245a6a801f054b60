"""
Tests for efcap Model
Parameters, exponents, regime classification and coordinate changes
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__)))

import math

import mpmath
import numpy as np
import pytest

from core.errors import InvalidParamsError
from core.model import (Criticality, JLPosition, Params, cap_coefficient_derivatives, cap_coefficients,
                        classify, compute_exponents, emden_from_u, flat_singular, flat_singular_residual,
                        joseph_lundgren_exponent, sobolev_exponent, sphere_U_from_u, stereographic_u_from_U)


class TestParams:
    def test_rejects_small_dimension(self):
        with pytest.raises(InvalidParamsError):
            Params(2, 3.0)

    def test_rejects_non_integer_dimension(self):
        with pytest.raises(InvalidParamsError):
            Params(3.5, 3.0)
        with pytest.raises(InvalidParamsError):
            Params(True, 3.0)

    def test_rejects_bad_exponent(self):
        for p in (1.0, 0.5, math.inf, math.nan):
            with pytest.raises(InvalidParamsError):
                Params(3, p)

    def test_conformal_weight(self):
        assert Params(3, 2.0).k == 0.5
        assert Params(6, 2.0).k == 2.0


class TestExponents:
    def test_critical_n3(self):
        exp = compute_exponents(Params(3, 5.0))
        assert exp.p_S == 5.0
        assert exp.alpha == 0.0
        assert exp.q == 0.0
        assert math.isclose(exp.m, 2.0, rel_tol=1e-14)
        assert math.isclose(exp.a, 0.25 ** 0.25, rel_tol=1e-14)

    def test_supercritical_n3_p7(self):
        exp = compute_exponents(Params(3, 7.0))
        assert math.isclose(exp.mu, 1.0 / 3.0, rel_tol=1e-14)
        assert math.isclose(exp.alpha, math.sqrt(2.0) / 2.0, rel_tol=1e-12)
        assert math.isclose(exp.q, 1.0, rel_tol=1e-14)
        assert math.isclose(exp.beta, math.sqrt(6.0 - 0.125), rel_tol=1e-12)

    def test_identity_m_squared(self):
        for N in range(3, 13):
            for p in np.linspace(sobolev_exponent(N), sobolev_exponent(N) + 10.0, 11)[1:]:
                exp = compute_exponents(Params(N, float(p)))
                assert abs(exp.m ** 2 * exp.mu * (N - 2 - exp.mu) - 1.0) < 1e-14

    def test_joseph_lundgren(self):
        assert math.isinf(joseph_lundgren_exponent(10))
        expected = 1.0 + 4.0 / (7.0 - 2.0 * math.sqrt(10.0))
        assert abs(joseph_lundgren_exponent(11) - expected) < 1e-12 * expected

    def test_subcritical_has_no_emden_scaling(self):
        exp = compute_exponents(Params(3, 3.0))
        assert exp.a is None and exp.m is None and exp.alpha is None
        assert exp.q == -1.0
        with pytest.raises(InvalidParamsError):
            exp.require_emden("test")

    def test_to_dict_serializes_infinity(self):
        data = compute_exponents(Params(3, 7.0)).to_dict()
        assert data["p_JL"] == "inf"


class TestClassify:
    def test_regimes(self):
        assert classify(Params(3, 3.0)).criticality is Criticality.SUBCRITICAL
        assert classify(Params(3, 5.0)).criticality is Criticality.CRITICAL
        assert classify(Params(3, 7.0)).criticality is Criticality.SUPERCRITICAL

    def test_joseph_lundgren_position(self):
        assert classify(Params(11, 7.0)).jl_position is JLPosition.AT_OR_ABOVE_JL
        assert classify(Params(11, 6.0)).jl_position is JLPosition.BELOW_JL
        assert classify(Params(3, 100.0)).jl_position is JLPosition.BELOW_JL

    def test_spiral_window(self):
        assert classify(Params(3, 7.0)).spiral
        assert not classify(Params(11, 8.0)).spiral


class TestCapCoefficients:
    def test_against_multiprecision(self):
        mpmath.mp.dps = 40
        N = 4
        exp = compute_exponents(Params(N, 5.0))
        for t in (-6.0, -1.5, -0.1, 0.0, 0.7, 2.0):
            e = mpmath.exp(2 * mpmath.mpf(exp.m) * t)
            B0_ref = (1 + e) ** mpmath.mpf(exp.q) - 1
            B1_ref = N * (N - 2) * e / (1 + e) ** 2
            B0, B1 = cap_coefficients(t, exp, N)
            assert abs(B0 - float(B0_ref)) <= 1e-13 * max(1.0, abs(float(B0_ref)))
            assert abs(B1 - float(B1_ref)) <= 1e-13 * max(1.0, abs(float(B1_ref)))

    def test_value_at_origin(self):
        exp = compute_exponents(Params(5, 3.0))
        _, B1 = cap_coefficients(0.0, exp, 5)
        assert math.isclose(B1, 15.0 / 4.0, rel_tol=1e-14)

    def test_far_tail_does_not_overflow(self):
        exp = compute_exponents(Params(3, 7.0))
        B0, B1 = cap_coefficients(np.array([-500.0, 300.0]), exp, 3)
        assert np.all(np.isfinite(B1))
        assert B0[0] == 0.0 and B1[0] >= 0.0

    def test_derivatives_match_differences(self):
        exp = compute_exponents(Params(3, 7.0))
        t, h = -0.8, 1e-6
        dB0, dB1 = cap_coefficient_derivatives(t, exp, 3)
        plus, minus = cap_coefficients(t + h, exp, 3), cap_coefficients(t - h, exp, 3)
        assert math.isclose(dB0, (plus[0] - minus[0]) / (2 * h), rel_tol=1e-6)
        assert math.isclose(dB1, (plus[1] - minus[1]) / (2 * h), rel_tol=1e-6)


class TestTransforms:
    def test_equator_is_fixed(self):
        r, u = stereographic_u_from_U(math.pi / 2, 0.7, 5)
        assert math.isclose(float(r), 1.0, rel_tol=1e-15)
        assert math.isclose(float(u), 0.7, rel_tol=1e-15)

    def test_derivative_transform(self):
        N = 4
        theta = np.array([0.3, 1.1, 2.0])
        U, dU = np.cos(theta), -np.sin(theta)
        r, u, du = stereographic_u_from_U(theta, U, N, dU)
        h = 1e-6
        _, u_plus = stereographic_u_from_U(2 * np.arctan(r + h), np.cos(2 * np.arctan(r + h)), N)
        _, u_minus = stereographic_u_from_U(2 * np.arctan(r - h), np.cos(2 * np.arctan(r - h)), N)
        assert np.allclose(du, (u_plus - u_minus) / (2 * h), rtol=1e-7)
        theta_back, U_back, dU_back = sphere_U_from_u(r, u, N, du)
        assert np.allclose(U_back, U, rtol=1e-13)
        assert np.allclose(dU_back, dU, rtol=1e-12, atol=1e-14)

    def test_rejects_theta_outside_range(self):
        with pytest.raises(InvalidParamsError):
            stereographic_u_from_U(math.pi, 1.0, 3)

    def test_flat_singular_is_equilibrium(self):
        exp = compute_exponents(Params(3, 7.0))
        rho = np.geomspace(0.01, 100.0, 50)
        u = flat_singular(rho, exp)
        t, y, z = emden_from_u(rho, u, exp, du=-exp.mu * u / rho, flat=True)
        assert np.allclose(y, 1.0, rtol=1e-14)
        assert np.allclose(z, 0.0, atol=1e-13)

    def test_flat_singular_residual(self):
        rho = np.geomspace(0.1, 10.0, 1001)
        for N, p in [(3, 7.0), (5, 4.0), (11, 8.0)]:
            assert flat_singular_residual(Params(N, p), rho) < 1e-10
