"""
Property-Based Tests for efcap Invariants
Exponent identities, regime consistency, coordinate changes and certificates
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__)))

import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from core.model import (Params, cap_coefficients, classify, compute_exponents, sobolev_exponent,
                        sphere_U_from_u, stereographic_u_from_U)
from core.phase import equilibrium_report, hamiltonian_H, lyapunov_J
from core.spectral import cap_integral, nonexistence_certificate


dimensions = st.integers(min_value=3, max_value=12)
offsets = st.floats(min_value=1e-3, max_value=20.0, allow_nan=False, allow_infinity=False)


class TestExponentInvariants:
    @given(N=dimensions, offset=offsets)
    @settings(max_examples=100, deadline=5000)
    def test_m_squared_identity(self, N, offset):
        """Property: m² μ (N-2-μ) = 1 for every p > p_S"""
        exp = compute_exponents(Params(N, sobolev_exponent(N) + offset))
        assert abs(exp.m ** 2 * exp.mu * (N - 2 - exp.mu) - 1.0) < 1e-12
        assert exp.alpha > 0.0
        assert exp.q > 0.0

    @given(N=st.integers(min_value=3, max_value=10), offset=offsets)
    @settings(max_examples=100, deadline=5000)
    def test_low_dimensions_always_spiral(self, N, offset):
        """Property: for N <= 10 the equilibrium is a focus above p_S, in both descriptions"""
        params = Params(N, sobolev_exponent(N) + offset)
        assert classify(params).spiral
        assert equilibrium_report(compute_exponents(params), params.p).spiral

    @given(N=st.integers(min_value=11, max_value=30), offset=offsets)
    @settings(max_examples=100, deadline=5000)
    def test_spiral_window_matches_eigenvalues(self, N, offset):
        """Property: the μ-window and the discriminant of λ² + αλ + (p-1) agree"""
        params = Params(N, sobolev_exponent(N) + offset)
        exp = compute_exponents(params)
        discriminant = exp.alpha ** 2 - 4.0 * (params.p - 1.0)
        assume(abs(discriminant) > 1e-9)
        assert classify(params).spiral == equilibrium_report(exp, params.p).spiral


class TestCoefficientInvariants:
    @given(N=dimensions, offset=offsets, t=st.floats(min_value=-50.0, max_value=0.0))
    @settings(max_examples=100, deadline=5000)
    def test_cap_coefficients_positive(self, N, offset, t):
        """Property: B0 >= 0 and 0 <= B1 <= N(N-2)/4 on the cap side for p > p_S"""
        exp = compute_exponents(Params(N, sobolev_exponent(N) + offset))
        B0, B1 = cap_coefficients(t, exp, N)
        assert B0 >= 0.0
        assert 0.0 <= B1 <= N * (N - 2) / 4.0


class TestTransformInvariants:
    @given(N=dimensions,
           theta=st.floats(min_value=1e-3, max_value=3.0),
           U=st.floats(min_value=-5.0, max_value=5.0, allow_nan=False),
           dU=st.floats(min_value=-5.0, max_value=5.0, allow_nan=False))
    @settings(max_examples=100, deadline=5000)
    def test_stereographic_inverse(self, N, theta, U, dU):
        """Property: sphere -> stereographic -> sphere returns the same data"""
        r, u, du = stereographic_u_from_U(theta, U, N, dU)
        theta_back, U_back, dU_back = sphere_U_from_u(r, u, N, du)
        assert math.isclose(float(theta_back), theta, rel_tol=1e-12)
        assert math.isclose(float(U_back), U, rel_tol=1e-9, abs_tol=1e-12)
        assert math.isclose(float(dU_back), dU, rel_tol=1e-9, abs_tol=1e-9)


class TestPhaseInvariants:
    @given(p=st.floats(min_value=1.1, max_value=50.0))
    @settings(max_examples=100, deadline=5000)
    def test_lyapunov_vanishes_on_axis_crossing(self, p):
        """Property: J(ξ, 0) = 0 with ξ = ((p+1)/2)^{1/(p-1)}"""
        xi = ((p + 1.0) / 2.0) ** (1.0 / (p - 1.0))
        assert abs(lyapunov_J(xi, 0.0, p)) < 1e-12 * max(1.0, xi * xi)

    @given(p=st.floats(min_value=1.1, max_value=50.0),
           y=st.floats(min_value=-1.2, max_value=1.2),
           z=st.floats(min_value=-3.0, max_value=3.0))
    @settings(max_examples=100, deadline=5000)
    def test_hamiltonian_is_shifted_lyapunov(self, p, y, z):
        """Property: H - J is the constant 1/2 - 1/(p+1)"""
        shift = hamiltonian_H(y, z, p) - lyapunov_J(y, z, p)
        assert math.isclose(shift, 0.5 - 1.0 / (p + 1.0), rel_tol=1e-9, abs_tol=1e-9)


class TestCertificateInvariants:
    @given(Theta=st.floats(min_value=0.2, max_value=3.0),
           p=st.floats(min_value=1.5, max_value=40.0),
           extra=st.floats(min_value=0.0, max_value=20.0))
    @settings(max_examples=50, deadline=None)
    def test_certificate_monotone_in_p(self, Theta, p, extra):
        """Property: a certified cap stays certified for every larger p"""
        if nonexistence_certificate(3, p, Theta, samples=500):
            assert nonexistence_certificate(3, p + extra, Theta, samples=500)

    @given(N=st.integers(min_value=3, max_value=9),
           Theta=st.floats(min_value=0.5, max_value=3.0),
           fraction=st.floats(min_value=0.05, max_value=0.95))
    @settings(max_examples=100, deadline=5000)
    def test_cap_integral_positive_and_decreasing(self, N, Theta, fraction):
        """Property: ∫_θ^Θ sin^{1-N} is positive and shrinks as θ grows"""
        theta = np.array([fraction * Theta * 0.5, fraction * Theta])
        values = cap_integral(theta, Theta, N)
        assert values[0] > values[1] > 0.0
