import math

import numpy as np
import pytest

from schrodingerize import (
    AccuracyError, SpectralBounds, WarpProfile, size_domains, smooth_profile_r2,
)


class TestSmoothProfile:
    def test_value_at_zero(self):
        assert smooth_profile_r2(0.0) == pytest.approx(1.0)

    def test_value_at_minus_one(self):
        # the cubic meets e^{-|p|} at p = -1
        assert smooth_profile_r2(-1.0) == pytest.approx(math.exp(-1.0))
        assert smooth_profile_r2(-1.0 + 1e-9) == pytest.approx(math.exp(-1.0),
                                                               abs=1e-7)

    def test_one_sided_derivatives(self):
        eps = 1e-7
        d_at_zero = (smooth_profile_r2(0.0) - smooth_profile_r2(-eps)) / eps
        assert d_at_zero == pytest.approx(-1.0, abs=1e-5)
        d_at_minus_one = (smooth_profile_r2(-1.0 + eps)
                          - smooth_profile_r2(-1.0)) / eps
        assert d_at_minus_one == pytest.approx(math.exp(-1.0), abs=1e-5)

    def test_c1_junctions_first_order(self):
        # one-sided difference quotients agree across p = 0 and p = -1,
        # with mismatch shrinking linearly in the step
        for junction in (0.0, -1.0):
            mismatches = []
            for eps in (1e-2, 1e-3, 1e-4):
                left = (smooth_profile_r2(junction)
                        - smooth_profile_r2(junction - eps)) / eps
                right = (smooth_profile_r2(junction + eps)
                         - smooth_profile_r2(junction)) / eps
                mismatches.append(abs(left - right))
            assert mismatches[1] < 0.2 * mismatches[0]
            assert mismatches[2] < 0.2 * mismatches[1]


class TestProfiles:
    @pytest.mark.parametrize("profile", [WarpProfile.exponential(),
                                         WarpProfile.smooth_r2()])
    def test_recovery_identity_for_positive_p(self, profile):
        p = np.linspace(0.0, 30.0, 301)
        np.testing.assert_allclose(profile(p) * np.exp(p), 1.0, rtol=1e-13)

    def test_exponential_even(self):
        prof = WarpProfile.exponential()
        p = np.linspace(0.1, 5.0, 50)
        np.testing.assert_allclose(prof(-p), prof(p))

    def test_from_name(self):
        assert WarpProfile.from_name("smooth").kind == "smooth-r2"
        assert WarpProfile.from_name("exponential").kind == "exponential"
        with pytest.raises(ValueError):
            WarpProfile.from_name("cubic-spline")


class TestSizeDomains:
    def test_zero_spectrum_collapses(self):
        bounds = SpectralBounds(0.0, 0.0, (0.0,))
        sizing = size_domains(bounds, T=1.0, R=1.0, epsilon=1e-6)
        assert sizing.pi_l == pytest.approx(math.log(1e6) + 1.0)
        assert sizing.pi_l == pytest.approx(14.815510557964274)

    def test_defining_inequalities_active(self):
        bounds = SpectralBounds(1.5, 4.0, (0.0,))
        T, R, eps = 1.25, 1.5, 1e-4
        sizing = size_domains(bounds, T=T, R=R, epsilon=eps)
        lhs1 = math.exp(-sizing.pi_l + 2 * bounds.lambda_plus * T + R)
        lhs2 = math.exp(-sizing.pi_l
                        + (bounds.lambda_minus + bounds.lambda_plus) * T + R)
        assert lhs1 <= eps * (1 + 1e-12)
        assert lhs2 <= eps * (1 + 1e-12)
        # minimality: the binding inequality is tight
        assert max(lhs1, lhs2) == pytest.approx(eps, rel=1e-12)

    def test_negative_side_dominates(self):
        # a spectrum reaching far down drives the domain size
        bounds = SpectralBounds(6.0, 4080.0, (0.0,))
        sizing = size_domains(bounds, T=1.0, R=1.0, epsilon=1e-6)
        assert sizing.pi_l == pytest.approx(math.log(1e6) + 4086.0 + 1.0)

    def test_inhomogeneous_margin(self):
        bounds = SpectralBounds(0.0, 0.0, (0.0,))
        homo = size_domains(bounds, T=1.0, epsilon=1e-6)
        inhomo = size_domains(bounds, T=1.0, epsilon=1e-6, inhomogeneous=True)
        assert inhomo.pi_l == pytest.approx(homo.pi_l + 1.0)

    def test_xi_truncation(self):
        bounds = SpectralBounds(0.0, 0.0, (0.0,))
        assert size_domains(bounds, T=1.0, epsilon=1e-2).X == 100.0

    def test_invalid_accuracy(self):
        bounds = SpectralBounds(0.0, 0.0, (0.0,))
        with pytest.raises(AccuracyError):
            size_domains(bounds, T=1.0, epsilon=1.0)
        with pytest.raises(ValueError):
            size_domains(bounds, T=1.0, R=3.0)
