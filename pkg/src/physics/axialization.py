"""
Closed-form radial modes of a laser-cooled ion under an axializing quadrupole drive.

The co-rotating half of the quadrupole at ω_a = ω_c + 2Δ is static in the frame rotating at
ω_r = ω_c/2 + Δ and couples the cyclotron-sense and magnetron-sense components of the motion.
Each free mode has complex rotating-frame detuning δ = δ₀ + iγ₀ solving

    (2δ − iβ)² = (2Δ + iM)² + (ε/ω₁)²

and contains a cyclotron-family component at ω_c′ + Δ + δ₀ and a magnetron-family component at
ω_m + Δ − δ₀, both damped at γ₀. The counter-rotating half of the quadrupole is left out here;
src.oracle.floquet measures what that costs.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from src.models.errors import IndeterminateRegimeError
from src.models.physics_types import (
    AxializationDrive,
    Branch,
    CoolingCoefficients,
    ModeFamily,
    ModeSolution,
    Regime,
    TrapConfig,
    TrapFrequencies,
)
from src.physics.drive_response import component_ratio
from src.physics.laser_cooling import SMALL_PARAMETER_RATIO

logger = logging.getLogger(__name__)

WEAK_REGIME_FACTOR = 0.1
STRONG_REGIME_FACTOR = 10.0


def epsilon_from_voltage(drive_voltage: float, cfg: TrapConfig) -> float:
    """ε = eV0/(2mr0²) in s⁻²."""
    return cfg.ion_charge * drive_voltage / (2.0 * cfg.ion_mass * cfg.ring_radius ** 2)


def n_parameter(co: CoolingCoefficients, fr: TrapFrequencies, drive: AxializationDrive) -> float:
    """N = Δ² − M²/4 + ε²/(4ω₁²)."""
    coupling = drive.epsilon / fr.omega_1
    return drive.half_detuning ** 2 - co.M ** 2 / 4.0 + coupling ** 2 / 4.0


def check_regime_validity(co: CoolingCoefficients, fr: TrapFrequencies, drive: AxializationDrive) -> None:
    """Warn when β, ε or Δ are not small against ω₁."""
    ratios = {
        "|β|/ω₁": abs(co.beta) / fr.omega_1,
        "ε/ω₁²": drive.epsilon / fr.omega_1 ** 2,
        "|Δ|/ω₁": abs(drive.half_detuning) / fr.omega_1,
    }
    for name, value in ratios.items():
        if value > SMALL_PARAMETER_RATIO:
            logger.warning(f"{name} = {value:.3g} is not small; axialization closed forms lose accuracy")


def shift_squared(n: np.ndarray, cross: np.ndarray) -> np.ndarray:
    """δ₀² from δ₀⁴ − Nδ₀² − (ΔM)²/4 = 0 without cancellation on either sign of N."""
    s = np.hypot(n, cross)
    with np.errstate(divide="ignore", invalid="ignore"):
        negative_branch = np.where(s - n > 0.0, cross ** 2 / (2.0 * (s - n)), 0.0)
    return np.where(n >= 0.0, (n + s) / 2.0, negative_branch)


def branch_arrays(
    co: CoolingCoefficients,
    fr: TrapFrequencies,
    epsilon: float,
    half_detunings: Sequence[float],
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorised δ₀ ≥ 0 and the damping of both branches over a grid of Δ.

    Returns:
        (delta0, gamma_plus, gamma_minus); gamma_plus belongs to +δ₀
    """
    big_delta = np.asarray(half_detunings, dtype=float)
    coupling = epsilon / fr.omega_1
    n = big_delta ** 2 - co.M ** 2 / 4.0 + coupling ** 2 / 4.0
    cross = big_delta * co.M
    delta0 = np.sqrt(shift_squared(n, cross))

    # At δ₀ = 0 the plus branch continues the Δ → 0⁺ limit.
    degenerate_split = math.copysign(1.0, co.M) * np.sqrt(np.maximum(-n, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        split = np.where(delta0 > 0.0, cross / (2.0 * delta0), degenerate_split)
    return delta0, co.beta / 2.0 + split, co.beta / 2.0 - split


def rotating_frame_roots(
    co: CoolingCoefficients,
    fr: TrapFrequencies,
    drive: AxializationDrive,
) -> Tuple[complex, complex]:
    """
    Exact complex roots δ = δ₀ + iγ₀ of (2δ − iβ)² = (2Δ + iM)² + (ε/ω₁)².

    Returns:
        (plus, minus) ordered by the sign of Re δ
    """
    coupling = drive.epsilon / fr.omega_1
    root = complex(np.sqrt(complex(2.0 * drive.half_detuning, co.M) ** 2 + coupling ** 2))
    first = (1j * co.beta + root) / 2.0
    second = (1j * co.beta - root) / 2.0
    return (first, second) if first.real >= second.real else (second, first)


def quartic_residual(co: CoolingCoefficients, fr: TrapFrequencies, drive: AxializationDrive, delta0: float) -> float:
    """Relative residual of δ₀⁴ − Nδ₀² − Δ²M²/4, scaled by the sum of term magnitudes."""
    n = n_parameter(co, fr, drive)
    constant = (drive.half_detuning * co.M) ** 2 / 4.0
    terms = (delta0 ** 4, n * delta0 ** 2, constant)
    scale = sum(abs(t) for t in terms)
    if scale == 0.0:
        return 0.0
    return abs(terms[0] - terms[1] - terms[2]) / scale


def _solve(co: CoolingCoefficients, fr: TrapFrequencies, drive: AxializationDrive) -> List[ModeSolution]:
    delta0_arr, gamma_plus_arr, gamma_minus_arr = branch_arrays(co, fr, drive.epsilon, [drive.half_detuning])
    delta0 = float(delta0_arr[0])
    roots = (
        (Branch.PLUS, delta0, float(gamma_plus_arr[0])),
        (Branch.MINUS, -delta0, float(gamma_minus_arr[0])),
    )

    solutions = []
    for branch, shift, damping in roots:
        ratio = component_ratio(co, fr, drive, complex(shift, damping))
        # ratio = |magnetron-sense| / |cyclotron-sense| within this mode
        cyclotron_dominance = 1.0 if ratio <= 1.0 else 1.0 / ratio
        magnetron_dominance = 1.0 if ratio >= 1.0 else ratio
        solutions.append(ModeSolution(
            delta0=shift,
            gamma0=damping,
            lab_frequency=fr.omega_c_prime + drive.half_detuning + shift,
            branch=branch,
            mode_family=ModeFamily.CYCLOTRON,
            dominance=cyclotron_dominance,
        ))
        solutions.append(ModeSolution(
            delta0=shift,
            gamma0=damping,
            lab_frequency=fr.omega_m + drive.half_detuning - shift,
            branch=branch,
            mode_family=ModeFamily.MAGNETRON,
            dominance=magnetron_dominance,
        ))
    return solutions


def solve_modes(co: CoolingCoefficients, fr: TrapFrequencies, drive: AxializationDrive) -> List[ModeSolution]:
    """
    Four motional components of the axialized ion.

    Args:
        co: Laser-cooling coefficients
        fr: Trap frequencies (ω₁ > 0)
        drive: Axialization drive

    Returns:
        [plus/cyclotron, plus/magnetron, minus/cyclotron, minus/magnetron]
    """
    if fr.omega_1 <= 0.0:
        raise ValueError("solve_modes requires ω₁ > 0")
    check_regime_validity(co, fr, drive)
    return _solve(co, fr, drive)


def sweep_modes(
    co: CoolingCoefficients,
    fr: TrapFrequencies,
    drive: AxializationDrive,
    half_detunings: Sequence[float],
) -> List[List[ModeSolution]]:
    """solve_modes over a grid of Δ, keeping ε from drive."""
    if fr.omega_1 <= 0.0:
        raise ValueError("sweep_modes requires ω₁ > 0")
    grid = list(half_detunings)
    if grid:
        widest = max(grid, key=abs)
        check_regime_validity(co, fr, drive.with_detuning(float(widest)))
    logger.debug(f"Sweeping modes over {len(grid)} detunings")
    return [_solve(co, fr, drive.with_detuning(float(d))) for d in grid]


def _branch_dampings(solutions: Sequence[ModeSolution]) -> Tuple[ModeSolution, ModeSolution]:
    plus = next((s for s in solutions if s.branch == Branch.PLUS), None)
    minus = next((s for s in solutions if s.branch == Branch.MINUS), None)
    if plus is None or minus is None:
        raise ValueError("solutions must contain both branches")
    return plus, minus


def damping_sum_check(solutions: Sequence[ModeSolution], co: CoolingCoefficients) -> float:
    """
    Residual γ₀(+δ₀) + γ₀(−δ₀) − β for the branches at one Δ.

    Raises:
        ValueError: At δ₀ = 0, where the identity is not defined
    """
    plus, minus = _branch_dampings(solutions)
    if plus.delta0 == 0.0:
        raise ValueError("damping sum is undefined at δ₀ = 0")
    return plus.gamma0 + minus.gamma0 - co.beta


def average_damping(solutions: Sequence[ModeSolution]) -> float:
    """Mean damping of the two branches (β/2 for any ε and Δ)."""
    plus, minus = _branch_dampings(solutions)
    return (plus.gamma0 + minus.gamma0) / 2.0


def classify_regime(co: CoolingCoefficients, fr: TrapFrequencies, drive: AxializationDrive) -> Regime:
    """
    Coupling regime from (ε/ω₁)² against M².

    Raises:
        IndeterminateRegimeError: If both M and ε vanish
    """
    coupling_sq = (drive.epsilon / fr.omega_1) ** 2
    m_sq = co.M ** 2
    if m_sq == 0.0 and coupling_sq == 0.0:
        raise IndeterminateRegimeError("regime is indeterminate when both M and ε are zero")
    if coupling_sq < WEAK_REGIME_FACTOR * m_sq:
        return Regime.WEAK
    if coupling_sq > STRONG_REGIME_FACTOR * m_sq:
        return Regime.STRONG
    return Regime.INTERMEDIATE


def avoided_crossing_gap(co: CoolingCoefficients, fr: TrapFrequencies, drive_at_resonance: AxializationDrive) -> float:
    """
    Separation 2δ₀ of the two branches at Δ = 0, i.e. sqrt((ε/ω₁)² − M²).

    Zero when (ε/ω₁)² ≤ M². Approaches ε/ω₁ in the strong regime.
    """
    if drive_at_resonance.half_detuning != 0.0:
        logger.warning(
            f"avoided_crossing_gap evaluates at Δ = 0; ignoring Δ = {drive_at_resonance.half_detuning:.6e} rad/s"
        )
    coupling = drive_at_resonance.epsilon / fr.omega_1
    return math.sqrt(max(0.0, coupling ** 2 - co.M ** 2))


@dataclass(frozen=True)
class LimitShifts:
    """Asymptotic (δ₀, γ₀) of both branches, (plus, minus), in each coupling regime."""

    weak_delta0: Tuple[float, float]
    weak_gamma0: Tuple[float, float]
    critical_delta0: Tuple[float, float]
    critical_gamma0: Tuple[float, float]
    strong_delta0: Tuple[float, float]
    strong_gamma0: Tuple[float, float]


def limit_shifts(co: CoolingCoefficients, fr: TrapFrequencies, drive: AxializationDrive) -> LimitShifts:
    """
    Limiting forms of the frequency shifts and damping rates.

    Weak coupling keeps the free modes (δ₀ = ±Δ), critical coupling ((ε/ω₁)² = M², |Δ| ≪ |M|)
    gives δ₀ = ±sqrt|ΔM/2|, strong coupling gives δ₀ = ±sqrt(Δ² + ε²/(4ω₁²)).
    """
    big_delta = drive.half_detuning
    beta = co.beta

    def dampings(shift: float) -> Tuple[float, float]:
        if shift == 0.0:
            return beta / 2.0, beta / 2.0
        split = big_delta * co.M / (2.0 * shift)
        return beta / 2.0 + split, beta / 2.0 - split

    weak = abs(big_delta)
    side = 1.0 if big_delta >= 0.0 else -1.0
    critical = math.sqrt(abs(big_delta * co.M / 2.0))
    strong = math.sqrt(big_delta ** 2 + (drive.epsilon / fr.omega_1) ** 2 / 4.0)

    return LimitShifts(
        weak_delta0=(weak, -weak),
        weak_gamma0=((beta + side * co.M) / 2.0, (beta - side * co.M) / 2.0),
        critical_delta0=(critical, -critical),
        critical_gamma0=dampings(critical),
        strong_delta0=(strong, -strong),
        strong_gamma0=dampings(strong),
    )
