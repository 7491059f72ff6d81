"""
Linearized laser-cooling force and the radial cooling rates without axialization.

The beam propagates along +x with a Gaussian transverse profile centred at y = y0. The
scattering rate is the two-level power-broadened Lorentzian

    R(y, ẋ) = (Γ/2) s(y) / (1 + s(y) + (2(Δ_L − kẋ)/Γ)²),   s(y) = s0 exp(−2(y − y0)²/w²)

and the radiation-pressure acceleration ħkR/m is expanded about y = 0, ẋ = 0 as
−2αy − 2βẋ. The constant part only shifts the equilibrium and is dropped.
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from src.models.constants import REDUCED_PLANCK
from src.models.physics_types import CoolingCoefficients, LaserConfig, TrapConfig, TrapFrequencies
from src.physics.trap_core import compute_frequencies

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Ratio above which a "small parameter" assumption is reported as violated.
SMALL_PARAMETER_RATIO = 0.1


def _saturation(laser: LaserConfig, y: ArrayLike, beam_offset: ArrayLike) -> ArrayLike:
    return laser.peak_saturation * np.exp(-2.0 * (y - beam_offset) ** 2 / laser.beam_waist ** 2)


def scattering_rate(laser: LaserConfig, y: ArrayLike, xdot: ArrayLike) -> ArrayLike:
    """
    Photon scattering rate of an ion at transverse position y moving with velocity ẋ.

    Args:
        laser: Beam configuration
        y: Transverse position in metres (scalar or array)
        xdot: Velocity along the beam in m/s (scalar or array)

    Returns:
        Scattering rate in photons/s, same shape as the broadcast inputs
    """
    s = _saturation(laser, y, laser.beam_offset)
    q = 2.0 * (laser.detuning - laser.wavenumber * xdot) / laser.linewidth
    return 0.5 * laser.linewidth * s / (1.0 + s + q ** 2)


def scattering_force(laser: LaserConfig, cfg: TrapConfig, y: ArrayLike, xdot: ArrayLike) -> ArrayLike:
    """Full radiation-pressure acceleration ħkR/m along +x, in m/s²."""
    return REDUCED_PLANCK * laser.wavenumber * scattering_rate(laser, y, xdot) / cfg.ion_mass


def _force_slopes(
    laser: LaserConfig,
    ion_mass: float,
    detuning: ArrayLike,
    beam_offset: ArrayLike,
) -> Tuple[ArrayLike, ArrayLike]:
    """Closed-form (α, β) at y = 0, ẋ = 0; broadcasts over detuning and beam offset."""
    k = laser.wavenumber
    s = _saturation(laser, 0.0, beam_offset)
    q = 2.0 * detuning / laser.linewidth
    d = 1.0 + s + q ** 2

    dR_dy = 0.5 * laser.linewidth * s * (4.0 * beam_offset / laser.beam_waist ** 2) * (1.0 + q ** 2) / d ** 2
    dR_dxdot = 2.0 * s * q * k / d ** 2

    prefactor = -REDUCED_PLANCK * k / (2.0 * ion_mass)
    return prefactor * dR_dy, prefactor * dR_dxdot


def linearize_force(laser: LaserConfig, cfg: TrapConfig) -> CoolingCoefficients:
    """
    Linearize the laser force about the trap centre.

    α = −(ħk/2m)·∂R/∂y and β = −(ħk/2m)·∂R/∂ẋ, both at y = 0, ẋ = 0. The ion must sit
    on the side of the beam where it co-propagates with the light (y0 < 0 for counter-clockwise
    circulation) for α to be positive.

    Args:
        laser: Beam configuration
        cfg: Trap configuration (mass and the frequencies entering M)

    Returns:
        CoolingCoefficients with M = (2α − βω_c)/(2ω₁)
    """
    alpha, beta = _force_slopes(laser, cfg.ion_mass, laser.detuning, laser.beam_offset)
    fr = compute_frequencies(cfg)
    coefficients = CoolingCoefficients.from_alpha_beta(float(alpha), float(beta), fr)
    logger.debug(f"Linearized laser force: α={coefficients.alpha:.6e} s⁻², β={coefficients.beta:.6e} s⁻¹")
    return coefficients


def check_small_parameters(co: CoolingCoefficients, fr: TrapFrequencies) -> None:
    """Warn when |β| or |α| are not small against ω₁ and ω₁²."""
    beta_ratio = abs(co.beta) / fr.omega_1
    alpha_ratio = abs(co.alpha) / fr.omega_1 ** 2
    if beta_ratio > SMALL_PARAMETER_RATIO:
        logger.warning(f"|β|/ω₁ = {beta_ratio:.3g} is not small; Taylor-expanded cooling rates lose accuracy")
    if alpha_ratio > SMALL_PARAMETER_RATIO:
        logger.warning(f"|α|/ω₁² = {alpha_ratio:.3g} is not small; Taylor-expanded cooling rates lose accuracy")


def cooling_rates(co: CoolingCoefficients, fr: TrapFrequencies) -> Tuple[float, float]:
    """
    Damping rates of the modified cyclotron and magnetron modes (positive means cooling).

    Args:
        co: Linearized laser-force coefficients
        fr: Trap frequencies

    Returns:
        (γ_cyc, γ_mag) in s⁻¹; their sum is β
    """
    check_small_parameters(co, fr)
    gamma_cyc = (co.beta * fr.omega_c_prime - co.alpha) / (2.0 * fr.omega_1)
    gamma_mag = (co.alpha - co.beta * fr.omega_m) / (2.0 * fr.omega_1)
    return gamma_cyc, gamma_mag


def cooling_roots_exact(co: CoolingCoefficients, fr: TrapFrequencies) -> Tuple[complex, complex]:
    """
    Exact complex roots ω = (ω_c + iβ)/2 ± sqrt(ω₁² − β²/4 + iω_cβ/2 − iα).

    Motion goes as e^{iωt}, so the imaginary part is the damping rate. The first root
    continues the modified cyclotron mode, the second the magnetron mode.
    """
    centre = complex(fr.omega_c, co.beta) / 2.0
    root = np.sqrt(complex(fr.omega_1 ** 2 - co.beta ** 2 / 4.0, fr.omega_c * co.beta / 2.0 - co.alpha))
    return complex(centre + root), complex(centre - root)


def cooling_criterion(co: CoolingCoefficients, fr: TrapFrequencies) -> bool:
    """Both radial modes are cooled: α, β > 0 and ω_m < α/β < ω_c′."""
    if co.alpha <= 0.0 or co.beta <= 0.0:
        return False
    return fr.omega_m < co.alpha / co.beta < fr.omega_c_prime


@dataclass(frozen=True)
class CoolingMap:
    """Cooling rates over a (beam offset, laser detuning) grid.

    Surfaces are indexed [i_y0, i_detuning].
    """

    y0_grid: np.ndarray
    detuning_grid: np.ndarray
    gamma_cyc: np.ndarray
    gamma_mag: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    def both_cooled(self) -> np.ndarray:
        return (self.gamma_cyc > 0.0) & (self.gamma_mag > 0.0)


def cooling_map(
    cfg: TrapConfig,
    laser_template: LaserConfig,
    y0_grid: np.ndarray,
    detuning_grid: np.ndarray,
) -> CoolingMap:
    """
    Evaluate both cooling rates over a grid of beam offsets and laser detunings.

    Every other beam parameter is taken from laser_template.

    Args:
        cfg: Trap configuration
        laser_template: Beam whose waist, saturation and transition are kept
        y0_grid: Beam offsets in metres, nonempty and monotone
        detuning_grid: Laser detunings in rad/s, nonempty and monotone

    Returns:
        CoolingMap with surfaces of shape (len(y0_grid), len(detuning_grid))
    """
    y0_grid = np.asarray(y0_grid, dtype=float)
    detuning_grid = np.asarray(detuning_grid, dtype=float)
    if y0_grid.size == 0 or detuning_grid.size == 0:
        raise ValueError("cooling map grids must be nonempty")

    fr = compute_frequencies(cfg)
    offsets, detunings = np.meshgrid(y0_grid, detuning_grid, indexing="ij")
    alpha, beta = _force_slopes(laser_template, cfg.ion_mass, detunings, offsets)

    gamma_cyc = (beta * fr.omega_c_prime - alpha) / (2.0 * fr.omega_1)
    gamma_mag = (alpha - beta * fr.omega_m) / (2.0 * fr.omega_1)

    worst_beta = float(np.max(np.abs(beta))) / fr.omega_1
    if worst_beta > SMALL_PARAMETER_RATIO:
        logger.warning(f"Cooling map reaches |β|/ω₁ = {worst_beta:.3g}; rates are outside the small-damping regime")
    logger.info(f"Cooling map evaluated on {y0_grid.size}×{detuning_grid.size} cells")

    return CoolingMap(
        y0_grid=y0_grid,
        detuning_grid=detuning_grid,
        gamma_cyc=gamma_cyc,
        gamma_mag=gamma_mag,
        alpha=alpha,
        beta=beta,
    )
