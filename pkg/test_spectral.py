"""
Tests for efcap Spectral
Cap eigenvalues, Bessel and Rayleigh checks, Pohozaev bounds and the p -> 1 limit
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__)))

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal

from core.branch import gamma_of_theta, scaled_gamma
from core.errors import InvalidParamsError
from core.integrate import integrate_sphere_regular, to_stereographic
from core.model import Params
from core.singular import compute_theta_star
from core.spectral import (F_closed_form_n3, F_function, bessel_first_zero, bessel_frame, bessel_limit_check,
                           cap_integral, closed_form_phi_n3, gamma_dagger, gamma_p_trend, lambda1,
                           lambda1_closed_form_n3, nonexistence_bound_n3, nonexistence_certificate,
                           nonexistence_scan, pohozaev_rate_check, pohozaev_trace, psi0, psi0_residual,
                           rayleigh_check, sup_F, theta_dagger)


def finite_volume_lambda1(N, Theta, cells):
    """Lowest eigenvalue of -(S φ')' = λ S φ, S = sin^{N-1}, φ(Θ) = 0, cell-centred"""
    h = Theta / cells
    centres = (np.arange(cells) + 0.5) * h
    faces = np.arange(1, cells + 1) * h
    S_c = np.sin(centres) ** (N - 1)
    S_f = np.sin(faces) ** (N - 1)
    left = np.concatenate(([0.0], S_f[:-1]))
    right = S_f.copy()
    right[-1] = 2.0 * S_f[-1]
    diagonal = (left + right) / (h * h * S_c)
    off = -S_f[:-1] / (h * h * np.sqrt(S_c[:-1] * S_c[1:]))
    values = eigh_tridiagonal(diagonal, off, eigvals_only=True, select="i", select_range=(0, 0))
    return float(values[0])


def richardson_lambda1(N, Theta, cells=1000):
    coarse = finite_volume_lambda1(N, Theta, cells)
    fine = finite_volume_lambda1(N, Theta, 2 * cells)
    return (4.0 * fine - coarse) / 3.0


class TestLambda1:
    def test_closed_form_n3(self):
        for Theta in (0.5, 1.0, 0.5 * math.pi, 2.0, 3.0):
            assert abs(lambda1(3, Theta).lambda1 - lambda1_closed_form_n3(Theta)) < 1e-8

    def test_three_quarter_sphere(self):
        assert abs(lambda1(3, 0.75 * math.pi).lambda1 - 7.0 / 9.0) < 1e-8

    def test_hemisphere_equals_dimension(self):
        for N in (4, 6):
            assert abs(lambda1(N, 0.5 * math.pi).lambda1 - N) < 1e-8

    def test_oracle_reproduces_n3(self):
        exact = lambda1_closed_form_n3(1.0)
        assert abs(richardson_lambda1(3, 1.0) - exact) < 1e-5 * exact

    def test_finite_volume_oracle_n4(self):
        for Theta in (1.0, 2.5):
            reference = richardson_lambda1(4, Theta)
            assert abs(lambda1(4, Theta).lambda1 - reference) < 1e-5 * reference

    def test_monotone_in_theta(self):
        values = [lambda1(5, Theta).lambda1 for Theta in (0.5, 1.0, 2.0, 3.0)]
        assert all(b < a for a, b in zip(values[:-1], values[1:]))

    def test_rejects_bad_input(self):
        with pytest.raises(InvalidParamsError):
            lambda1(2, 1.0)
        with pytest.raises(InvalidParamsError):
            lambda1(3, math.pi)


class TestBessel:
    def test_first_zeros(self):
        assert abs(bessel_first_zero(0.5) - math.pi) < 1e-12
        assert abs(bessel_first_zero(0.0) - 2.404825557695773) < 1e-12
        assert abs(bessel_first_zero(1.0) - 3.831705970207512) < 1e-12

    def test_small_cap_limit(self):
        rows = bessel_limit_check(3, [1e2, 1e3, 1e4])
        frame = bessel_frame(3, rows)
        errors = list(frame["error"])
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 0.05


class TestRayleigh:
    def test_quadratic_form_matches_integral(self):
        params = Params(3, 3.0)
        profile = to_stereographic(integrate_sphere_regular(params, 1.0), 3)
        H_of_u, integral_form = rayleigh_check(params, profile)
        assert H_of_u < 0.0 and integral_form < 0.0
        assert abs(H_of_u - integral_form) < 1e-6 * abs(integral_form)

    def test_rejects_sphere_profile(self):
        params = Params(3, 3.0)
        with pytest.raises(InvalidParamsError):
            rayleigh_check(params, integrate_sphere_regular(params, 1.0))


class TestPsi0:
    def test_values(self):
        assert abs(psi0(1.0, 5)) < 1e-15
        assert math.isclose(psi0(0.0, 6), 4.0, rel_tol=1e-15)

    def test_identity(self):
        r = np.linspace(0.1, 10.0, 2001)
        for N in (3, 4, 10):
            assert psi0_residual(N, r) < 1e-9


class TestCapIntegral:
    def test_against_quadrature(self):
        for N in (3, 4, 5, 8):
            Theta, theta = 2.5, 0.4
            expected, _ = quad(lambda x: math.sin(x) ** (1 - N), theta, Theta, epsabs=0.0, epsrel=1e-13)
            assert math.isclose(cap_integral(theta, Theta, N), expected, rel_tol=1e-10)

    def test_f_closed_form_n3(self):
        theta = np.linspace(0.01, 2.0, 400)
        assert np.max(np.abs(F_function(theta, 2.0, 3) - F_closed_form_n3(theta, 2.0))) < 1e-10

    def test_f_limit_at_pole(self):
        assert abs(F_function(1e-5, 2.0, 4) - 0.5) < 1e-4

    def test_rejects_theta_beyond_cap(self):
        with pytest.raises(InvalidParamsError):
            cap_integral(2.0, 1.0, 3)


class TestPohozaev:
    def test_regular_endpoints(self):
        for N, p, Gamma in [(3, 3.0, 1.0), (4, 2.0, 2.0), (3, 7.0, 5.0)]:
            params = Params(N, p)
            trace = pohozaev_trace(params, integrate_sphere_regular(params, Gamma))
            assert trace.endpoints_ok(1e-8)
            assert trace.identity_residual < 1e-6

    def test_singular_rate(self):
        params = Params(3, 7.0)
        sing = compute_theta_star(params)
        trace = pohozaev_trace(params, sing.profile)
        assert trace.endpoints_ok(1e-8, include_start=False)
        assert pohozaev_rate_check(params, sing.profile).ok(1e-2)


class TestNonexistence:
    def test_sup_f_n3(self):
        Theta = 2.0
        assert abs(sup_F(3, Theta) - (0.5 + 0.5 / math.sin(Theta))) < 1e-9
        assert sup_F(3, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_certificate_n3_p10(self):
        bound = nonexistence_bound_n3(10.0)
        assert abs(bound - (math.pi - math.asin(4.0 / 9.0))) < 1e-15
        assert abs(bound - 2.681039) < 1e-6
        assert nonexistence_certificate(3, 10.0, 2.0)
        assert not nonexistence_certificate(3, 10.0, 3.1)
        for Theta in np.linspace(0.5, 3.1, 27):
            if abs(Theta - bound) > 1e-6:
                assert nonexistence_certificate(3, 10.0, Theta) == (Theta < bound)

    def test_bound_needs_p_above_five(self):
        with pytest.raises(InvalidParamsError):
            nonexistence_bound_n3(4.0)

    def test_scan_frame(self):
        frame = nonexistence_scan(3, [6.0, 10.0], [2.0, 3.0], samples=2000)
        assert list(frame.columns) == ["N", "p", "Theta", "certified"]
        assert len(frame) == 4
        assert bool(frame[(frame.p == 10.0) & (frame.Theta == 2.0)]["certified"].iloc[0])


class TestLimitP1:
    def test_theta_dagger_n3(self):
        target = math.pi / math.sqrt(2.0)
        assert abs(theta_dagger(3) - target) < 1e-8
        assert abs(theta_dagger(3, method="bisect") - target) < 1e-8
        with pytest.raises(InvalidParamsError):
            theta_dagger(3, method="newton")

    def test_gamma_dagger_closed_form(self):
        shooting = gamma_dagger(3)
        closed = gamma_dagger(3, phi=closed_form_phi_n3(math.pi / math.sqrt(2.0)))
        assert abs(shooting - closed) < 1e-6 * closed

    def test_gamma_trend_switches_at_theta_dagger(self):
        below = [G for _, G in gamma_p_trend(3, 1.8, [1.5, 1.2])]
        above = [G for _, G in gamma_p_trend(3, 2.6, [1.5, 1.2])]
        assert below[1] > below[0]
        assert above[1] < above[0]

    def test_scaling_identity(self):
        params = Params(3, 1.5)
        direct = gamma_of_theta(params, 1.8)
        scaled = scaled_gamma(params, 1.8, lambda1(3, 1.8).lambda1)
        assert abs(scaled - direct) < 1e-6 * direct
