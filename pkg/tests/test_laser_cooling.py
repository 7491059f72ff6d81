"""Tests for the linearized laser force and the cooling rates without axialization."""

import os
import sys
import logging
import pytest
import numpy as np

# Add the project root to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.models.constants import MICROMETRE, TransitionPreset, khz_to_rad_s
from src.models.physics_types import CoolingCoefficients, LaserConfig, TrapConfig
from src.physics.laser_cooling import (
    cooling_criterion,
    cooling_map,
    cooling_rates,
    cooling_roots_exact,
    linearize_force,
    scattering_force,
    scattering_rate,
)
from src.physics.trap_core import compute_frequencies, frequencies_from_pair


@pytest.fixture
def trap():
    """The fig4 trap: ⁴⁰Ca⁺ at 0.98 T and 3 V."""
    return TrapConfig.from_frequency_pair(khz_to_rad_s(380.0), khz_to_rad_s(165.0))


@pytest.fixture
def laser():
    """Red-detuned 397 nm beam offset to −30 μm."""
    return LaserConfig.from_transition(
        TransitionPreset.CA40_397,
        detuning=khz_to_rad_s(-10800.0),
        beam_offset=-30.0 * MICROMETRE,
        beam_waist=50.0 * MICROMETRE,
        peak_saturation=0.1,
    )


class TestScatteringRate:
    """Tests for the two-level scattering rate."""

    def test_resonant_peak(self, laser):
        """On resonance at the beam centre R = (Γ/2)s0/(1 + s0)."""
        resonant = laser.model_copy(update={"detuning": 0.0})
        rate = scattering_rate(resonant, laser.beam_offset, 0.0)
        assert rate == pytest.approx(0.5 * laser.linewidth * 0.1 / 1.1)

    def test_doppler_shift(self, laser):
        """Moving with kẋ = Δ_L puts the ion on resonance."""
        xdot = laser.detuning / laser.wavenumber
        on_resonance = scattering_rate(laser, laser.beam_offset, xdot)
        assert on_resonance == pytest.approx(0.5 * laser.linewidth * 0.1 / 1.1)

    def test_vectorised(self, laser):
        """Array inputs broadcast."""
        y = np.linspace(-1e-4, 1e-4, 7)
        assert scattering_rate(laser, y, 0.0).shape == (7,)


class TestLinearizeForce:
    """Tests for linearize_force."""

    def test_matches_finite_difference(self, laser, trap):
        """α = −½∂F/∂y and β = −½∂F/∂ẋ of the full force."""
        co = linearize_force(laser, trap)
        dy = 1e-9
        dv = 1e-3
        d_force_dy = (scattering_force(laser, trap, dy, 0.0) - scattering_force(laser, trap, -dy, 0.0)) / (2 * dy)
        d_force_dv = (scattering_force(laser, trap, 0.0, dv) - scattering_force(laser, trap, 0.0, -dv)) / (2 * dv)
        assert co.alpha == pytest.approx(-0.5 * d_force_dy, rel=1e-5)
        assert co.beta == pytest.approx(-0.5 * d_force_dv, rel=1e-5)

    def test_finite_difference_second_order(self, laser, trap):
        """Halving the step cuts the central-difference error about fourfold."""
        co = linearize_force(laser, trap)

        def slope_in_y(h):
            return -0.5 * (scattering_force(laser, trap, h, 0.0) - scattering_force(laser, trap, -h, 0.0)) / (2 * h)

        def slope_in_velocity(h):
            return -0.5 * (scattering_force(laser, trap, 0.0, h) - scattering_force(laser, trap, 0.0, -h)) / (2 * h)

        for exact, slope, h in ((co.alpha, slope_in_y, 2e-6), (co.beta, slope_in_velocity, 0.2)):
            errors = [abs(slope(step) - exact) for step in (h, h / 2, h / 4)]
            assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.05)
            assert errors[1] / errors[2] == pytest.approx(4.0, rel=0.05)

    def test_signs(self, laser, trap):
        """Red detuning gives β > 0; a beam offset to y0 < 0 gives α > 0."""
        co = linearize_force(laser, trap)
        assert co.beta > 0.0
        assert co.alpha > 0.0
        mirrored = linearize_force(laser.model_copy(update={"beam_offset": 30.0 * MICROMETRE}), trap)
        assert mirrored.alpha == pytest.approx(-co.alpha)

    def test_alpha_over_beta_ratio(self, laser, trap):
        """α/β = Γy0(1 + q²)/(w²qk)."""
        co = linearize_force(laser, trap)
        q = 2.0 * laser.detuning / laser.linewidth
        expected = laser.linewidth * laser.beam_offset * (1 + q ** 2) / (laser.beam_waist ** 2 * q * laser.wavenumber)
        assert co.alpha / co.beta == pytest.approx(expected, rel=1e-12)

    def test_centred_beam_has_no_alpha(self, laser, trap):
        """A beam centred on the trap gives no intensity gradient."""
        co = linearize_force(laser.model_copy(update={"beam_offset": 0.0}), trap)
        assert co.alpha == 0.0

    def test_zero_intensity(self, laser, trap):
        """s0 = 0 switches the force off."""
        co = linearize_force(laser.model_copy(update={"peak_saturation": 0.0}), trap)
        assert co.alpha == 0.0
        assert co.beta == 0.0


class TestCoolingRates:
    """Tests for cooling_rates and the exact roots."""

    def test_rates_sum_to_beta(self, laser, trap):
        """γ_cyc + γ_mag = β and γ_mag − γ_cyc = M."""
        fr = compute_frequencies(trap)
        co = linearize_force(laser, trap)
        gamma_cyc, gamma_mag = cooling_rates(co, fr)
        assert gamma_cyc + gamma_mag == pytest.approx(co.beta, rel=1e-12)
        assert gamma_mag - gamma_cyc == pytest.approx(co.M, rel=1e-12)

    def test_exact_roots_agree(self):
        """Imaginary parts of the exact roots match the rates to first order in β/ω₁."""
        fr = frequencies_from_pair(khz_to_rad_s(380.0), khz_to_rad_s(165.0))
        co = CoolingCoefficients.from_ratio(khz_to_rad_s(100.0), khz_to_rad_s(0.1), fr)
        gamma_cyc, gamma_mag = cooling_rates(co, fr)
        cyc_root, mag_root = cooling_roots_exact(co, fr)
        assert cyc_root.imag == pytest.approx(gamma_cyc, rel=1e-4)
        assert mag_root.imag == pytest.approx(gamma_mag, rel=1e-4)
        assert cyc_root.real == pytest.approx(fr.omega_c_prime, rel=1e-6)
        assert mag_root.real == pytest.approx(fr.omega_m, rel=1e-4)

    def test_criterion(self):
        """Both modes cool exactly when ω_m < α/β < ω_c′."""
        fr = frequencies_from_pair(khz_to_rad_s(380.0), khz_to_rad_s(165.0))
        inside = CoolingCoefficients.from_alpha_beta(khz_to_rad_s(100.0) * 10.0, 10.0, fr)
        below = CoolingCoefficients.from_alpha_beta(khz_to_rad_s(10.0) * 10.0, 10.0, fr)
        assert cooling_criterion(inside, fr)
        assert not cooling_criterion(below, fr)
        gamma_cyc, gamma_mag = cooling_rates(below, fr)
        assert gamma_cyc > 0.0 > gamma_mag

    def test_large_beta_warns(self, caplog):
        """β comparable to ω₁ is reported as outside the small-damping regime."""
        fr = frequencies_from_pair(khz_to_rad_s(380.0), khz_to_rad_s(165.0))
        co = CoolingCoefficients.from_alpha_beta(0.0, 0.5 * fr.omega_1, fr)
        with caplog.at_level(logging.WARNING):
            cooling_rates(co, fr)
        assert "is not small" in caplog.text


class TestFromRatio:
    """Tests for the ratio parametrisation of (α, β)."""

    def test_ratio_and_m(self):
        """α/β and |M| are reproduced with β > 0."""
        fr = frequencies_from_pair(khz_to_rad_s(380.0), khz_to_rad_s(165.0))
        co = CoolingCoefficients.from_ratio(khz_to_rad_s(100.0), khz_to_rad_s(0.1), fr)
        assert co.beta > 0.0
        assert co.alpha / co.beta == pytest.approx(khz_to_rad_s(100.0))
        assert abs(co.M) == pytest.approx(khz_to_rad_s(0.1))
        assert co.beta == pytest.approx(khz_to_rad_s(0.18333333333), rel=1e-9)

    def test_degenerate_ratio(self):
        """α/β = ω_c/2 leaves M = 0 for any β."""
        fr = frequencies_from_pair(khz_to_rad_s(380.0), khz_to_rad_s(165.0))
        with pytest.raises(ValueError):
            CoolingCoefficients.from_ratio(fr.omega_c / 2.0, 1.0, fr)


class TestCoolingMap:
    """Tests for the (y0, Δ_L) cooling map."""

    def test_shape_and_pointwise(self, laser, trap):
        """Surfaces are [i_y0, i_det] and agree with linearize_force cell by cell."""
        y0 = np.linspace(-60e-6, 60e-6, 5)
        det = np.array([khz_to_rad_s(-20000.0), khz_to_rad_s(-5000.0), khz_to_rad_s(8000.0)])
        surface = cooling_map(trap, laser, y0, det)
        assert surface.gamma_cyc.shape == (5, 3)

        fr = compute_frequencies(trap)
        cell = laser.model_copy(update={"beam_offset": y0[1], "detuning": det[0]})
        gamma_cyc, gamma_mag = cooling_rates(linearize_force(cell, trap), fr)
        assert surface.gamma_cyc[1, 0] == pytest.approx(gamma_cyc, rel=1e-12)
        assert surface.gamma_mag[1, 0] == pytest.approx(gamma_mag, rel=1e-12)

    def test_zero_intensity_map(self, laser, trap):
        """An all-zero intensity gives all-zero rates."""
        dark = laser.model_copy(update={"peak_saturation": 0.0})
        surface = cooling_map(trap, dark, np.array([-1e-5, 1e-5]), np.array([-1e7, 1e7]))
        assert np.all(surface.gamma_cyc == 0.0)
        assert np.all(surface.gamma_mag == 0.0)

    def test_empty_grid_rejected(self, laser, trap):
        """Empty grids are an error."""
        with pytest.raises(ValueError):
            cooling_map(trap, laser, np.array([]), np.array([1.0]))
