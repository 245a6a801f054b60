"""
Tests for efcap Integrate
Shooting integrators against closed-form solutions
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__)))

import math

import numpy as np
import pytest

from core.errors import IntegrationError, InvalidParamsError
from core.integrate import (IntegratorConfig, ProfileKind, integrate_flat_regular, integrate_sphere_linear,
                            integrate_sphere_regular, integrate_variational, to_stereographic)
from core.model import Params


class TestIntegratorConfig:
    def test_defaults_are_valid(self):
        cfg = IntegratorConfig()
        assert cfg.validate() == []
        assert cfg.to_dict()["max_step"] == "inf"

    def test_rejects_loose_tolerance(self):
        with pytest.raises(InvalidParamsError):
            IntegratorConfig(rel_tol=0.1)

    def test_rejects_unknown_method(self):
        with pytest.raises(InvalidParamsError):
            IntegratorConfig(method="Euler")

    def test_scaled(self):
        cfg = IntegratorConfig().scaled(1e-2)
        assert math.isclose(cfg.rel_tol, 1e-12)
        assert math.isclose(cfg.abs_tol, 1e-14)


class TestSphereLinear:
    def test_first_zero_n3(self):
        # N=3: φ = sin(kθ) / (k sin θ) with λ = k² - 1
        for k in (1.5, 2.0, 4.0):
            profile = integrate_sphere_linear(3, k * k - 1.0)
            assert abs(profile.first_zero - math.pi / k) < 1e-8

    def test_hemisphere_eigenfunction(self):
        # cos θ solves the N-dimensional equation with λ = N
        profile = integrate_sphere_linear(5, 5.0)
        assert abs(profile.first_zero - math.pi / 2) < 1e-8
        theta = np.linspace(0.1, 1.5, 15)
        value, _ = profile.evaluate(theta)
        assert np.allclose(value, np.cos(theta), atol=1e-8)


class TestFlatRegular:
    def test_lane_emden_closed_form(self):
        # N=3, p=5: ū = γ̄ (1 + γ̄^4 ρ²/3)^{-1/2}
        gamma_bar = 1.7
        profile = integrate_flat_regular(Params(3, 5.0), gamma_bar, 50.0)
        rho = np.geomspace(0.01, 50.0, 40)
        value, _ = profile.evaluate(rho)
        exact = gamma_bar / np.sqrt(1.0 + gamma_bar ** 4 * rho ** 2 / 3.0)
        assert np.allclose(value, exact, rtol=1e-7)
        assert profile.first_zero is None
        assert profile.kind is ProfileKind.RHO_FLAT

    def test_subcritical_has_zero(self):
        profile = integrate_flat_regular(Params(3, 3.0), 1.0, 20.0)
        assert profile.first_zero is not None
        assert profile.sign_changes() >= 1

    def test_scaling_law(self):
        # ū(ρ, γ̄) = γ̄ ū(γ̄^{(p-1)/2} ρ, 1)
        params = Params(3, 7.0)
        gamma_bar = 1.5
        stretch = gamma_bar ** 3.0
        scaled = integrate_flat_regular(params, gamma_bar, 5.0)
        unit = integrate_flat_regular(params, 1.0, 20.0)
        rho = np.array([0.05, 0.3, 1.0, 2.5, 5.0])
        left, _ = scaled.evaluate(rho)
        right, _ = unit.evaluate(stretch * rho)
        assert np.allclose(left, gamma_bar * right, rtol=1e-8, atol=0.0)

    def test_rejects_bad_arguments(self):
        with pytest.raises(InvalidParamsError):
            integrate_flat_regular(Params(3, 7.0), -1.0, 10.0)


class TestSphereRegular:
    def test_critical_zero_beyond_equator(self):
        params = Params(3, 5.0)
        previous = math.pi
        for Gamma in (0.5, 1.0, 10.0, 100.0):
            profile = integrate_sphere_regular(params, Gamma)
            assert math.pi / 2 < profile.first_zero < previous
            assert profile.end_derivative < 0.0
            assert 0.0 < profile.zero_error < 1e-6
            previous = profile.first_zero

    def test_profile_frame(self):
        profile = integrate_sphere_regular(Params(4, 2.0), 1.0)
        frame = profile.to_frame()
        assert list(frame.columns) == ["x", "value", "derivative"]
        assert frame["value"].iloc[0] == pytest.approx(1.0, abs=1e-10)
        assert np.all(frame["value"].iloc[:-1] > 0.0)

    def test_step_budget(self):
        with pytest.raises(IntegrationError):
            integrate_sphere_regular(Params(3, 3.0), 1.0, IntegratorConfig(max_steps=3))

    def test_rejects_nonpositive_gamma(self):
        with pytest.raises(InvalidParamsError):
            integrate_sphere_regular(Params(3, 3.0), 0.0)

    def test_small_gamma_zero_next_to_antipode(self):
        # N=3: U ≈ Γ(1 - Γ^{p-1} h) with h ~ (π/2)/(π - θ) near the antipode
        for p, Gamma in ((5.0, 1e-3), (7.0, 1e-2)):
            profile = integrate_sphere_regular(Params(3, p), Gamma)
            expected_gap = 0.5 * math.pi * Gamma ** (p - 1.0)
            assert math.isclose(profile.zero_gap, expected_gap, rel_tol=1e-3)
            assert math.pi - profile.first_zero < 0.1
            assert profile.end_derivative < 0.0
            value, _ = profile.evaluate_gap(profile.zero_gap)
            assert abs(value[0]) < 1e-10 * Gamma

    def test_tiny_gamma_critical(self):
        profile = integrate_sphere_regular(Params(3, 5.0), 1e-4)
        assert profile.first_zero > 3.0
        assert 0.0 < profile.zero_gap < 1e-12

    def test_taylor_start_consistency(self):
        params = Params(3, 3.0)
        theta_start = 1e-3
        coarse = integrate_sphere_regular(params, 1.0, IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14,
                                                                        theta_start=theta_start))
        fine = integrate_sphere_regular(params, 1.0, IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14,
                                                                      theta_start=theta_start / 10))
        assert abs(coarse.first_zero - fine.first_zero) <= 5.0 * theta_start ** 3


class TestStereographic:
    def test_zero_maps_to_tangent(self):
        profile = integrate_sphere_regular(Params(3, 3.0), 2.0)
        stereo = to_stereographic(profile, 3)
        assert stereo.kind is ProfileKind.R_STEREOGRAPHIC
        assert math.isclose(stereo.first_zero, math.tan(0.5 * profile.first_zero), rel_tol=1e-14)

    def test_variational_frame_agrees_with_sphere(self):
        params = Params(3, 7.0)
        for Gamma in (0.3, 3.0):
            theta_zero = integrate_sphere_regular(params, Gamma).first_zero
            u_profile, w_profile, w_end = integrate_variational(params, Gamma)
            assert math.isclose(u_profile.first_zero, math.tan(0.5 * theta_zero), rel_tol=1e-7)
            assert math.isfinite(w_end)
            assert w_profile.value[0] == pytest.approx(1.0, abs=1e-8)

    def test_variational_small_gamma(self):
        params = Params(3, 7.0)
        Gamma = 1e-2
        u_profile, w_profile, w_end = integrate_variational(params, Gamma)
        # R(γ) ≈ 2/(π - Θ) lies far beyond any fixed stereographic cut-off
        assert u_profile.first_zero > 1e11
        assert math.isclose(u_profile.first_zero, 1.0 / math.tan(0.5 * u_profile.meta["Theta_gap"]), rel_tol=1e-14)
        assert w_end < 0.0
        assert u_profile.meta["W_end"] < 0.0
        assert w_profile.sign_changes() == 1
        assert w_profile.first_zero < u_profile.first_zero

    def test_rejects_wrong_kind(self):
        profile = integrate_flat_regular(Params(3, 5.0), 1.0, 5.0)
        with pytest.raises(InvalidParamsError):
            to_stereographic(profile, 3)
