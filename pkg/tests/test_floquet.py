"""Tests for the Floquet oracle against the closed-form modes."""

import os
import sys
import math
import pytest
import numpy as np

# Add the project root to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.models.constants import khz_to_rad_s
from src.models.errors import BranchAmbiguityError
from src.models.physics_types import (
    AxializationDrive,
    Branch,
    CoolingCoefficients,
    ModeFamily,
    ModeSolution,
)
from src.oracle.floquet import (
    counterrotating_error,
    equivalence_grid,
    match_exponents,
    monodromy,
    monodromy_matrix,
)
from src.physics.laser_cooling import cooling_rates, cooling_roots_exact
from src.physics.trap_core import frequencies_from_pair


@pytest.fixture
def fr():
    """Reference trap frequencies."""
    return frequencies_from_pair(khz_to_rad_s(380.0), khz_to_rad_s(165.0))


@pytest.fixture
def co(fr):
    """α/β = 100 ×2π kHz with |M| = 0.1 ×2π kHz."""
    return CoolingCoefficients.from_ratio(khz_to_rad_s(100.0), khz_to_rad_s(0.1), fr)


def drive_for(co, fr, coupling_sq_over_m_sq, half_detuning_khz):
    """Drive with (ε/ω₁)² = coupling_sq_over_m_sq · M²."""
    epsilon = math.sqrt(coupling_sq_over_m_sq) * abs(co.M) * fr.omega_1
    return AxializationDrive(epsilon=epsilon, half_detuning=khz_to_rad_s(half_detuning_khz))


def candidate(frequency, damping):
    """A bare mode record for matching tests."""
    return ModeSolution(
        delta0=0.0,
        gamma0=damping,
        lab_frequency=frequency,
        branch=Branch.PLUS,
        mode_family=ModeFamily.CYCLOTRON,
        dominance=1.0,
    )


class TestEquivalenceGrid:
    """Tests for the Δ grid used by the equivalence check."""

    def test_never_samples_zero(self):
        """Neither odd nor even grids hit Δ = 0."""
        for points in (2, 4, 21, 22):
            grid = equivalence_grid(1.0, points)
            assert len(grid) == points
            assert np.min(np.abs(grid)) > 0.0

    def test_odd_grid_is_shifted(self):
        """An odd grid is offset by half a step."""
        grid = equivalence_grid(2.0, 21)
        step = 4.0 / 20
        assert grid[0] == pytest.approx(-2.0 + step / 2.0)

    def test_too_few_points(self):
        """A single point is rejected."""
        with pytest.raises(ValueError):
            equivalence_grid(1.0, 1)


class TestMatchExponents:
    """Tests for the assignment of exponents to mode records."""

    def test_assignment(self):
        """Each exponent goes to its nearest record, frequencies wrapped modulo ω_a."""
        omega_a = 1000.0
        candidates = [candidate(100.0, 1.0), candidate(300.0, 2.0)]
        exponents = np.array([complex(-2.0, 300.5 - omega_a), complex(-1.0, 100.2)])
        matched = match_exponents(exponents, candidates, omega_a)
        assert matched[0].frequency == pytest.approx(100.2)
        assert matched[1].frequency == pytest.approx(300.5)
        assert matched[1].frequency_error == pytest.approx(0.5)
        assert matched[0].damping_error == pytest.approx(0.0)

    def test_ambiguous(self):
        """Close candidates with large match errors raise BranchAmbiguityError."""
        candidates = [candidate(100.0, 1.0), candidate(100.5, 1.0)]
        exponents = np.array([complex(-1.0, 99.0), complex(-1.0, 101.5)])
        with pytest.raises(BranchAmbiguityError):
            match_exponents(exponents, candidates, 1e6)

    def test_identical_candidates_allowed(self):
        """Exactly degenerate candidates are not ambiguous."""
        candidates = [candidate(100.0, 1.0), candidate(100.0, 1.0)]
        exponents = np.array([complex(-1.0, 99.0), complex(-1.0, 101.0)])
        matched = match_exponents(exponents, candidates, 1e6)
        assert len(matched) == 2


class TestMonodromy:
    """Tests for the monodromy matrix and its exponents."""

    def test_liouville_determinant(self, co, fr):
        """det Φ(T) = exp(−2βT) from the trace of the linear flow."""
        drive = drive_for(co, fr, 100.0, 0.1)
        matrix = monodromy_matrix(fr, co, drive, tol=1e-12)
        period = 2.0 * math.pi / drive.drive_frequency(fr)
        assert np.linalg.det(matrix) == pytest.approx(math.exp(-2.0 * co.beta * period), rel=1e-9)

    def test_damping_sum(self, co, fr):
        """The four exponent dampings sum to 2β."""
        result = monodromy(fr, co, drive_for(co, fr, 100.0, 0.1), tol=1e-12)
        assert result.damping_sum == pytest.approx(2.0 * co.beta, rel=1e-9)

    @pytest.mark.parametrize("coupling,detuning_khz", [(0.01, 0.7), (1.05, -0.35), (100.0, 0.1), (100.0, 1.5)])
    def test_matches_closed_form(self, co, fr, coupling, detuning_khz):
        """Exponents agree with the closed-form records."""
        result = monodromy(fr, co, drive_for(co, fr, coupling, detuning_khz), tol=1e-10)
        assert len(result.matched_modes) == 4
        assert result.max_frequency_error < 1e-3 * fr.omega_1
        for m in result.matched_modes:
            allowance = max(1e-3 * co.beta, 1e-2 * abs(m.solution.gamma0))
            assert m.damping_error < allowance

    def test_uncoupled_exponents_are_free_modes(self, co, fr):
        """With ε = 0 the exponents are iω_c′ − γ_cyc and iω_m − γ_mag (mod iω_a) and their conjugates."""
        drive = AxializationDrive(epsilon=0.0, half_detuning=khz_to_rad_s(0.7))
        omega_a = drive.drive_frequency(fr)
        result = monodromy(fr, co, drive, tol=1e-10)
        gamma_cyc, gamma_mag = cooling_rates(co, fr)

        def closest(frequency, damping):
            gap = np.mod(result.floquet_exponents.imag - frequency + omega_a / 2.0, omega_a) - omega_a / 2.0
            i = int(np.argmin(np.hypot(gap, -result.floquet_exponents.real - damping)))
            return abs(gap[i]), abs(-result.floquet_exponents.real[i] - damping)

        for root in cooling_roots_exact(co, fr):
            for frequency in (root.real, -root.real):
                freq_error, damp_error = closest(frequency, root.imag)
                assert freq_error < 1e-6 * fr.omega_1
                assert damp_error < 1e-3 * co.beta

        for frequency, damping in ((fr.omega_c_prime, gamma_cyc), (fr.omega_m, gamma_mag)):
            freq_error, damp_error = closest(frequency, damping)
            assert freq_error < 1e-3 * fr.omega_1
            assert damp_error < max(1e-3 * co.beta, 1e-2 * abs(damping))

    def test_undamped_volume(self, fr):
        """Without the laser the multipliers lie on the unit circle."""
        co = CoolingCoefficients(alpha=0.0, beta=0.0, M=0.0)
        result = monodromy(fr, co, AxializationDrive(epsilon=1e9, half_detuning=khz_to_rad_s(0.5)), tol=1e-12)
        assert abs(np.prod(result.multipliers) - 1.0) < 1e-10
        assert np.abs(result.multipliers) == pytest.approx(np.ones(4), abs=1e-8)


@pytest.mark.integration
class TestCounterRotating:
    """Tests for the cost of the co-rotating reduction."""

    def test_small_against_splitting(self, co, fr):
        """Dropping the counter-rotating half shifts exponents far less than ε/ω₁."""
        drive = drive_for(co, fr, 100.0, 0.1)
        error = counterrotating_error(fr, co, drive, tol=1e-10)
        assert error < 1e-2 * drive.epsilon / fr.omega_1
