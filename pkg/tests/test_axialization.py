"""Tests for the closed-form dressed modes under an axializing drive."""

import os
import sys
import math
import logging
import pytest
import numpy as np

# Add the project root to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.models.constants import IonSpecies, khz_to_rad_s
from src.models.errors import IndeterminateRegimeError
from src.models.physics_types import (
    AxializationDrive,
    Branch,
    CoolingCoefficients,
    ModeFamily,
    Regime,
    TrapConfig,
)
from src.physics.axialization import (
    average_damping,
    avoided_crossing_gap,
    branch_arrays,
    classify_regime,
    damping_sum_check,
    epsilon_from_voltage,
    limit_shifts,
    quartic_residual,
    rotating_frame_roots,
    shift_squared,
    solve_modes,
    sweep_modes,
)
from src.physics.laser_cooling import cooling_rates
from src.physics.trap_core import frequencies_from_pair


@pytest.fixture
def fr():
    """Reference trap frequencies."""
    return frequencies_from_pair(khz_to_rad_s(380.0), khz_to_rad_s(165.0))


@pytest.fixture
def co(fr):
    """α/β = 100 ×2π kHz with |M| = 0.1 ×2π kHz."""
    return CoolingCoefficients.from_ratio(khz_to_rad_s(100.0), khz_to_rad_s(0.1), fr)


def drive_for(co, fr, coupling_sq_over_m_sq, half_detuning_khz=0.0):
    """Drive with (ε/ω₁)² = coupling_sq_over_m_sq · M²."""
    epsilon = math.sqrt(coupling_sq_over_m_sq) * abs(co.M) * fr.omega_1
    return AxializationDrive(epsilon=epsilon, half_detuning=khz_to_rad_s(half_detuning_khz))


class TestShiftAndDamping:
    """Tests for δ₀, γ₀ against the exact complex roots."""

    @pytest.mark.parametrize("coupling", [0.01, 1.0, 1.05, 100.0])
    @pytest.mark.parametrize("detuning_khz", [-1.3, -0.05, 0.02, 0.7, 5.0])
    def test_matches_exact_roots(self, co, fr, coupling, detuning_khz):
        """δ₀ + iγ₀ of each branch equals the root of the complex quadratic."""
        drive = drive_for(co, fr, coupling, detuning_khz)
        plus, minus = rotating_frame_roots(co, fr, drive)
        solutions = solve_modes(co, fr, drive)
        assert solutions[0].delta0 == pytest.approx(plus.real, rel=1e-9)
        assert solutions[0].gamma0 == pytest.approx(plus.imag, rel=1e-9)
        assert solutions[2].delta0 == pytest.approx(minus.real, rel=1e-9)
        assert solutions[2].gamma0 == pytest.approx(minus.imag, rel=1e-9)

    def test_quartic_residual(self, co, fr):
        """δ₀ satisfies δ₀⁴ − Nδ₀² − Δ²M²/4 = 0."""
        drive = drive_for(co, fr, 1.05, 0.3)
        delta0 = solve_modes(co, fr, drive)[0].delta0
        assert quartic_residual(co, fr, drive, delta0) < 1e-12

    def test_shift_squared_stable_for_negative_n(self):
        """The N < 0 branch keeps full precision where (N + S)/2 would cancel."""
        n = np.array([-1.0e6])
        cross = np.array([1.0e-3])
        d2 = shift_squared(n, cross)[0]
        assert d2 == pytest.approx(cross[0] ** 2 / (4.0 * 1.0e6), rel=1e-12)
        assert d2 > 0.0

    def test_damping_sum(self, co, fr):
        """γ₀(+δ₀) + γ₀(−δ₀) = β and the average is β/2."""
        for coupling in (0.01, 1.0, 1.05, 100.0):
            for detuning_khz in (-2.0, -0.1, 0.4, 2.0):
                solutions = solve_modes(co, fr, drive_for(co, fr, coupling, detuning_khz))
                assert abs(damping_sum_check(solutions, co)) < 1e-12 * co.beta
                assert average_damping(solutions) == pytest.approx(co.beta / 2.0, rel=1e-12)

    def test_damping_sum_undefined_at_zero_shift(self, co, fr):
        """The identity check refuses δ₀ = 0."""
        solutions = solve_modes(co, fr, drive_for(co, fr, 0.01, 0.0))
        assert solutions[0].delta0 == 0.0
        with pytest.raises(ValueError):
            damping_sum_check(solutions, co)

    def test_degenerate_branches(self, co, fr):
        """At Δ = 0 below critical coupling the dampings are β/2 ± √(M² − (ε/ω₁)²)/2."""
        solutions = solve_modes(co, fr, drive_for(co, fr, 0.01, 0.0))
        spread = math.sqrt(co.M ** 2 * (1.0 - 0.01)) / 2.0
        assert solutions[0].gamma0 == pytest.approx(co.beta / 2.0 + math.copysign(spread, co.M), rel=1e-12)
        assert solutions[2].gamma0 == pytest.approx(co.beta / 2.0 - math.copysign(spread, co.M), rel=1e-12)
        plus, minus = rotating_frame_roots(co, fr, drive_for(co, fr, 0.01, 0.0))
        assert sorted([plus.imag, minus.imag]) == pytest.approx(
            sorted([solutions[0].gamma0, solutions[2].gamma0]), rel=1e-12
        )

    def test_degenerate_limit_is_continuous(self, co, fr):
        """The δ₀ = 0 dampings continue the Δ → 0⁺ values."""
        at_zero = solve_modes(co, fr, drive_for(co, fr, 0.01, 0.0))
        just_above = solve_modes(co, fr, drive_for(co, fr, 0.01, 1e-9))
        assert at_zero[0].gamma0 == pytest.approx(just_above[0].gamma0, rel=1e-4)


class TestModeRecords:
    """Tests for the four ModeSolution records."""

    def test_record_order_and_frequencies(self, co, fr):
        """Records are plus/cyc, plus/mag, minus/cyc, minus/mag at ω_c′ + Δ + δ₀ and ω_m + Δ − δ₀."""
        drive = drive_for(co, fr, 100.0, 0.5)
        solutions = solve_modes(co, fr, drive)
        assert [(s.branch, s.mode_family) for s in solutions] == [
            (Branch.PLUS, ModeFamily.CYCLOTRON),
            (Branch.PLUS, ModeFamily.MAGNETRON),
            (Branch.MINUS, ModeFamily.CYCLOTRON),
            (Branch.MINUS, ModeFamily.MAGNETRON),
        ]
        delta = drive.half_detuning
        for s in solutions:
            if s.mode_family == ModeFamily.CYCLOTRON:
                assert s.lab_frequency == pytest.approx(fr.omega_c_prime + delta + s.delta0)
            else:
                assert s.lab_frequency == pytest.approx(fr.omega_m + delta - s.delta0)

    def test_one_major_component_per_mode(self, co, fr):
        """Each branch has one record with dominance 1 and the other at most 1."""
        solutions = solve_modes(co, fr, drive_for(co, fr, 0.01, 1.0))
        for branch in (Branch.PLUS, Branch.MINUS):
            records = [s for s in solutions if s.branch == branch]
            assert max(s.dominance for s in records) == 1.0
            assert all(0.0 <= s.dominance <= 1.0 for s in records)

    def test_epsilon_zero_reduction(self, co, fr):
        """Without coupling the major components are the free modes with γ_cyc and γ_mag."""
        gamma_cyc, gamma_mag = cooling_rates(co, fr)
        for detuning_khz in (-1.5, -0.2, 0.3, 1.9):
            solutions = solve_modes(co, fr, AxializationDrive(epsilon=0.0, half_detuning=khz_to_rad_s(detuning_khz)))
            major = [s for s in solutions if s.dominance == 1.0]
            assert len(major) == 2
            for s in major:
                if s.mode_family == ModeFamily.CYCLOTRON:
                    assert s.lab_frequency == pytest.approx(fr.omega_c_prime, rel=1e-12)
                    assert s.gamma0 == pytest.approx(gamma_cyc, rel=1e-12)
                else:
                    assert s.lab_frequency == pytest.approx(fr.omega_m, rel=1e-12)
                    assert s.gamma0 == pytest.approx(gamma_mag, rel=1e-12)

    def test_weak_dressed_branch_is_thin(self, co, fr):
        """Under weak coupling the component following the drive has less than half the amplitude."""
        solutions = solve_modes(co, fr, drive_for(co, fr, 0.01, 1.0))
        thin = [s for s in solutions if not s.is_thick]
        assert len(thin) == 2

    def test_sweep_matches_pointwise(self, co, fr):
        """sweep_modes returns solve_modes at each Δ."""
        drive = drive_for(co, fr, 1.05)
        grid = [khz_to_rad_s(d) for d in (-1.0, 0.0, 0.25)]
        swept = sweep_modes(co, fr, drive, grid)
        assert len(swept) == 3
        for d, solutions in zip(grid, swept):
            assert solutions == solve_modes(co, fr, drive.with_detuning(d))


class TestRegimes:
    """Tests for regime classification and the avoided crossing."""

    @pytest.mark.parametrize(
        "coupling,regime",
        [(0.01, Regime.WEAK), (1.0, Regime.INTERMEDIATE), (1.05, Regime.INTERMEDIATE), (100.0, Regime.STRONG)],
    )
    def test_classify(self, co, fr, coupling, regime):
        """(ε/ω₁)² against M² sets the regime."""
        assert classify_regime(co, fr, drive_for(co, fr, coupling)) == regime

    def test_indeterminate(self, fr):
        """M = ε = 0 has no regime."""
        co = CoolingCoefficients(alpha=0.0, beta=0.0, M=0.0)
        with pytest.raises(IndeterminateRegimeError):
            classify_regime(co, fr, AxializationDrive(epsilon=0.0))

    def test_strong_gap(self, co, fr):
        """The gap at Δ = 0 is √((ε/ω₁)² − M²) and approaches ε/ω₁."""
        drive = drive_for(co, fr, 100.0)
        coupling = drive.epsilon / fr.omega_1
        gap = avoided_crossing_gap(co, fr, drive)
        assert gap == pytest.approx(math.sqrt(coupling ** 2 - co.M ** 2), rel=1e-12)
        assert gap == pytest.approx(2.0 * solve_modes(co, fr, drive)[0].delta0, rel=1e-9)
        assert abs(gap - coupling) / coupling <= co.M ** 2 / coupling ** 2

    def test_no_gap_below_critical(self, co, fr):
        """Sub-critical coupling leaves the branches touching."""
        assert avoided_crossing_gap(co, fr, drive_for(co, fr, 0.01)) == 0.0
        assert avoided_crossing_gap(co, fr, drive_for(co, fr, 1.0)) < 1e-6 * abs(co.M)

    def test_gap_warns_off_resonance(self, co, fr, caplog):
        """A nonzero Δ is ignored with a warning."""
        with caplog.at_level(logging.WARNING):
            avoided_crossing_gap(co, fr, drive_for(co, fr, 100.0, 1.0))
        assert "ignoring" in caplog.text

    def test_anti_cooling_beyond_threshold(self, fr):
        """With α/β = 10 ×2π kHz one branch heats once |Δ| is large enough."""
        co = CoolingCoefficients.from_ratio(khz_to_rad_s(10.0), khz_to_rad_s(0.31622776601683794), fr)
        epsilon = abs(co.M) * fr.omega_1
        _, gamma_plus, gamma_minus = branch_arrays(co, fr, epsilon, [khz_to_rad_s(0.1), khz_to_rad_s(1.0)])
        lowest = np.minimum(gamma_plus, gamma_minus)
        assert lowest[0] > 0.0
        assert lowest[1] < 0.0


class TestLimits:
    """Tests for the asymptotic shift formulas."""

    def test_strong_limit(self, co, fr):
        """Strong coupling: δ₀ ≈ √(Δ² + ε²/4ω₁²)."""
        drive = drive_for(co, fr, 100.0, 5.0)
        limits = limit_shifts(co, fr, drive)
        exact = solve_modes(co, fr, drive)[0].delta0
        assert limits.strong_delta0[0] == pytest.approx(exact, rel=1e-3)
        assert limits.strong_delta0[1] == -limits.strong_delta0[0]

    def test_weak_limit(self, co, fr):
        """Weak coupling: δ₀ ≈ ±Δ with dampings (β ± M)/2."""
        drive = drive_for(co, fr, 0.01, 2.0)
        limits = limit_shifts(co, fr, drive)
        solutions = solve_modes(co, fr, drive)
        assert limits.weak_delta0[0] == pytest.approx(solutions[0].delta0, rel=1e-4)
        assert limits.weak_gamma0[0] == pytest.approx(solutions[0].gamma0, rel=1e-3)
        assert limits.weak_gamma0[1] == pytest.approx(solutions[2].gamma0, rel=1e-3)

    @pytest.mark.parametrize("sign", [1.0, -1.0])
    def test_critical_limit(self, co, fr, sign):
        """(ε/ω₁)² = M² with |Δ| ≪ |M|: δ₀ ≈ ±√|ΔM/2| and γ₀ ≈ β/2 ± √|ΔM/2|."""
        drive = drive_for(co, fr, 1.0, sign * 1e-4)
        root = math.sqrt(abs(drive.half_detuning * co.M) / 2.0)
        limits = limit_shifts(co, fr, drive)
        solutions = solve_modes(co, fr, drive)

        assert limits.critical_delta0 == pytest.approx((root, -root))
        assert sorted(limits.critical_gamma0) == pytest.approx([co.beta / 2.0 - root, co.beta / 2.0 + root])
        assert solutions[0].delta0 == pytest.approx(root, rel=1e-2)
        assert solutions[2].delta0 == pytest.approx(-root, rel=1e-2)
        assert solutions[0].gamma0 == pytest.approx(limits.critical_gamma0[0], abs=1e-2 * root)
        assert solutions[2].gamma0 == pytest.approx(limits.critical_gamma0[1], abs=1e-2 * root)

    @pytest.mark.parametrize("coupling,multiple", [(0.01, 10.0), (1.0, -10.0), (100.0, 10.0), (100.0, -25.0)])
    def test_large_detuning_limit(self, co, fr, coupling, multiple):
        """|Δ| ≥ 10·max(|M|, ε/ω₁): every |δ₀| is within 1% of |Δ|."""
        coupling_rate = math.sqrt(coupling) * abs(co.M)
        drive = AxializationDrive(
            epsilon=coupling_rate * fr.omega_1,
            half_detuning=multiple * max(abs(co.M), coupling_rate),
        )
        for s in solve_modes(co, fr, drive):
            assert abs(abs(s.delta0) - abs(drive.half_detuning)) < 1e-2 * abs(drive.half_detuning)


class TestDriveStrength:
    """Tests for ε from the drive voltage."""

    def test_epsilon_from_voltage(self):
        """ε = eV0/(2mr0²)."""
        cfg = TrapConfig.for_species(IonSpecies.CA40, 3.0, 3.5355e-3, 5.0e-3, 0.98)
        assert epsilon_from_voltage(0.1, cfg) == pytest.approx(
            cfg.ion_charge * 0.1 / (2 * cfg.ion_mass * 5.0e-3 ** 2)
        )
        assert epsilon_from_voltage(0.0, cfg) == 0.0
