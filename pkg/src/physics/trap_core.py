"""
Unperturbed Penning-trap eigenfrequencies.

Radial motion of a single ion splits into the modified cyclotron mode at
ω_c′ = ω_c/2 + ω₁ and the magnetron mode at ω_m = ω_c/2 − ω₁, with
ω₁ = sqrt(ω_c²/4 − ω_z²/2).
"""

import logging
import math

from src.models.errors import UnstableTrapError
from src.models.physics_types import TrapConfig, TrapFrequencies

logger = logging.getLogger(__name__)


def axial_frequency(cfg: TrapConfig) -> float:
    """ω_z = sqrt(4eU0 / (m(2z0² + r0²)))."""
    denominator = cfg.ion_mass * (2.0 * cfg.axial_half_gap ** 2 + cfg.ring_radius ** 2)
    return math.sqrt(4.0 * cfg.ion_charge * cfg.endcap_voltage / denominator)


def compute_frequencies(cfg: TrapConfig) -> TrapFrequencies:
    """
    Compute the five characteristic frequencies of a trap.

    Args:
        cfg: Validated trap configuration

    Returns:
        TrapFrequencies in rad/s

    Raises:
        UnstableTrapError: If the radial confinement fails (ω_c²/4 ≤ ω_z²/2)
    """
    omega_c = cfg.ion_charge * cfg.magnetic_field / cfg.ion_mass
    omega_z = axial_frequency(cfg)
    radicand = omega_c ** 2 / 4.0 - omega_z ** 2 / 2.0
    if radicand <= 0.0:
        logger.error(f"Unstable trap: ω_c²/4 = {omega_c ** 2 / 4.0:.6e}, ω_z²/2 = {omega_z ** 2 / 2.0:.6e}")
        raise UnstableTrapError(
            f"unstable trap: ω_c²/4 ({omega_c ** 2 / 4.0:.6e}) must exceed ω_z²/2 ({omega_z ** 2 / 2.0:.6e}); "
            f"lower the endcap voltage or raise the magnetic field"
        )

    omega_1 = math.sqrt(radicand)
    omega_c_prime = omega_c / 2.0 + omega_1
    # ω_m from the root product avoids cancellation when ω_z ≪ ω_c
    omega_m = (omega_z ** 2 / 2.0) / omega_c_prime

    logger.debug(
        f"Trap frequencies (rad/s): ω_c={omega_c:.6e}, ω_z={omega_z:.6e}, "
        f"ω_c′={omega_c_prime:.6e}, ω_m={omega_m:.6e}"
    )
    return TrapFrequencies(
        omega_z=omega_z,
        omega_c=omega_c,
        omega_1=omega_1,
        omega_c_prime=omega_c_prime,
        omega_m=omega_m,
    )


def frequencies_from_pair(omega_c: float, omega_1: float) -> TrapFrequencies:
    """
    Fill in the trap frequencies from a (ω_c, ω₁) pair.

    Args:
        omega_c: True cyclotron frequency in rad/s
        omega_1: Half the radial mode splitting in rad/s

    Returns:
        TrapFrequencies consistent with ω_z² = 2(ω_c²/4 − ω₁²)

    Raises:
        UnstableTrapError: If ω₁ > ω_c/2 or either input is negative
    """
    if omega_c < 0.0 or omega_1 < 0.0 or omega_1 > omega_c / 2.0:
        raise UnstableTrapError(
            f"unstable trap: need ω_c/2 ≥ ω₁ ≥ 0, got ω_c={omega_c!r} rad/s, ω₁={omega_1!r} rad/s"
        )

    omega_m = omega_c / 2.0 - omega_1
    omega_c_prime = omega_c / 2.0 + omega_1
    return TrapFrequencies(
        omega_z=math.sqrt(2.0 * omega_m * omega_c_prime),
        omega_c=omega_c,
        omega_1=omega_1,
        omega_c_prime=omega_c_prime,
        omega_m=omega_m,
    )
