"""Domain types shared by the closed-form physics and the numerical oracle.

Input parameters are validated, immutable pydantic models. Computed results are frozen
dataclasses. All frequencies are angular (rad/s) and all lengths are metres.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from src.models.constants import (
    TRANSITION_CONFIG,
    IonSpecies,
    TransitionPreset,
    ion_charge,
    ion_mass,
)
from src.models.errors import UnstableTrapError


class ModeFamily(str, Enum):
    """Radial motional families of the Penning trap."""
    MAGNETRON = "magnetron"
    CYCLOTRON = "cyclotron"


class Branch(str, Enum):
    """Sign of the rotating-frame frequency shift δ₀."""
    PLUS = "plus"
    MINUS = "minus"


class Regime(str, Enum):
    """Coupling regime set by (ε/ω₁)² relative to M²."""
    WEAK = "weak"
    INTERMEDIATE = "intermediate"
    STRONG = "strong"


class Polarization(str, Enum):
    """Polarization of the dipolar excitation in the lab frame."""
    ROTATING = "rotating"
    LINEAR = "linear"


class TrapConfig(BaseModel):
    """Physical parameters of an ideal Penning trap holding a single ion."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "endcap_voltage": 3.0,
                "axial_half_gap": 3.5355e-3,
                "ring_radius": 5.0e-3,
                "magnetic_field": 0.98,
                "ion_mass": 6.6421562664e-26,
                "ion_charge": 1.602176634e-19,
            }
        },
    )

    endcap_voltage: float = Field(ge=0.0, description="U0 in volts")
    axial_half_gap: float = Field(gt=0.0, description="z0 in metres")
    ring_radius: float = Field(gt=0.0, description="r0 in metres")
    magnetic_field: float = Field(gt=0.0, description="B in tesla")
    ion_mass: float = Field(gt=0.0, description="m in kilograms")
    ion_charge: float = Field(gt=0.0, description="e in coulombs")

    @classmethod
    def for_species(
        cls,
        species: IonSpecies,
        endcap_voltage: float,
        axial_half_gap: float,
        ring_radius: float,
        magnetic_field: float,
    ) -> "TrapConfig":
        """Build a trap configuration for a named ion species."""
        return cls(
            endcap_voltage=endcap_voltage,
            axial_half_gap=axial_half_gap,
            ring_radius=ring_radius,
            magnetic_field=magnetic_field,
            ion_mass=ion_mass(species),
            ion_charge=ion_charge(species),
        )

    @classmethod
    def from_frequency_pair(
        cls,
        omega_c: float,
        omega_1: float,
        species: IonSpecies = IonSpecies.CA40,
        ring_radius: float = 5.0e-3,
        axial_half_gap: Optional[float] = None,
    ) -> "TrapConfig":
        """Build the physical trap that reproduces a (ω_c, ω₁) pair.

        Args:
            omega_c: True cyclotron frequency in rad/s.
            omega_1: Half the radial mode splitting in rad/s.
            species: Ion species supplying mass and charge.
            ring_radius: r0 in metres.
            axial_half_gap: z0 in metres; defaults to r0/√2 (ideal hyperbolic trap).

        Returns:
            A TrapConfig whose compute_frequencies reproduces the pair.

        Raises:
            UnstableTrapError: If ω₁ > ω_c/2 or either frequency is negative.
        """
        if omega_c <= 0.0 or omega_1 < 0.0 or omega_1 > omega_c / 2.0:
            raise UnstableTrapError(
                f"Invalid frequency pair: need ω_c/2 ≥ ω₁ ≥ 0, got ω_c={omega_c!r}, ω₁={omega_1!r}"
            )
        z0 = axial_half_gap if axial_half_gap is not None else ring_radius / math.sqrt(2.0)
        mass = ion_mass(species)
        charge = ion_charge(species)
        omega_z_sq = 2.0 * (omega_c ** 2 / 4.0 - omega_1 ** 2)
        return cls(
            endcap_voltage=omega_z_sq * mass * (2.0 * z0 ** 2 + ring_radius ** 2) / (4.0 * charge),
            axial_half_gap=z0,
            ring_radius=ring_radius,
            magnetic_field=mass * omega_c / charge,
            ion_mass=mass,
            ion_charge=charge,
        )


@dataclass(frozen=True)
class TrapFrequencies:
    """Unperturbed eigenfrequencies of the trap, all in rad/s."""

    omega_z: float
    omega_c: float
    omega_1: float
    omega_c_prime: float
    omega_m: float


class LaserConfig(BaseModel):
    """Cooling beam: detuning, transverse geometry and transition parameters."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "detuning": -6.786e7,
                "beam_offset": -30.0e-6,
                "beam_waist": 50.0e-6,
                "peak_saturation": 0.1,
                "linewidth": 1.3572e8,
                "wavelength": 396.959e-9,
            }
        },
    )

    detuning: float = Field(description="Δ_L = 2π(ν_L − ν_0) in rad/s")
    beam_offset: float = Field(description="y0 in metres")
    beam_waist: float = Field(gt=0.0, description="w in metres")
    peak_saturation: float = Field(ge=0.0, description="s0 = I/I_sat at beam centre")
    linewidth: float = Field(gt=0.0, description="Γ in rad/s")
    wavelength: float = Field(gt=0.0, description="λ in metres")

    @property
    def wavenumber(self) -> float:
        """k = 2π/λ in 1/m; the beam propagates along +x."""
        return 2.0 * math.pi / self.wavelength

    @classmethod
    def from_transition(
        cls,
        transition: TransitionPreset,
        detuning: float,
        beam_offset: float,
        beam_waist: float,
        peak_saturation: float,
    ) -> "LaserConfig":
        """Build a beam on one of the shipped cooling transitions."""
        params = TRANSITION_CONFIG[TransitionPreset(transition)]
        return cls(
            detuning=detuning,
            beam_offset=beam_offset,
            beam_waist=beam_waist,
            peak_saturation=peak_saturation,
            linewidth=params["linewidth"],
            wavelength=params["wavelength"],
        )


@dataclass(frozen=True)
class CoolingCoefficients:
    """Linearized laser force F = −2αm·y − 2βm·ẋ and the cooling-strength parameter M."""

    alpha: float
    beta: float
    M: float

    @classmethod
    def from_alpha_beta(cls, alpha: float, beta: float, fr: TrapFrequencies) -> "CoolingCoefficients":
        """Attach M = (2α − βω_c)/(2ω₁) to a given (α, β)."""
        return cls(alpha=alpha, beta=beta, M=(2.0 * alpha - beta * fr.omega_c) / (2.0 * fr.omega_1))

    @classmethod
    def from_ratio(cls, alpha_over_beta: float, m_abs: float, fr: TrapFrequencies) -> "CoolingCoefficients":
        """Coefficients from the ratio α/β (rad/s) and |M| (rad/s), taking β > 0.

        Raises:
            ValueError: If 2α/β = ω_c, where M vanishes for every β.
        """
        lever = (2.0 * alpha_over_beta - fr.omega_c) / (2.0 * fr.omega_1)
        if lever == 0.0:
            raise ValueError("α/β = ω_c/2 fixes M = 0; |M| cannot be chosen")
        beta = abs(m_abs / lever)
        return cls.from_alpha_beta(alpha_over_beta * beta, beta, fr)


class AxializationDrive(BaseModel):
    """Quadrupolar axialization drive at ω_a = ω_c + 2Δ with coupling ε = eV0/(2mr0²)."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"example": {"epsilon": 1.07e9, "half_detuning": 0.0, "drive_voltage": None}},
    )

    epsilon: float = Field(ge=0.0, description="ε in s⁻²")
    half_detuning: float = Field(default=0.0, description="Δ in rad/s")
    drive_voltage: Optional[float] = Field(default=None, description="V0 in volts, when ε came from it")

    def drive_frequency(self, fr: TrapFrequencies) -> float:
        """ω_a = ω_c + 2Δ."""
        return fr.omega_c + 2.0 * self.half_detuning

    def rotating_frequency(self, fr: TrapFrequencies) -> float:
        """ω_r = ω_c/2 + Δ, the frame in which the co-rotating quadrupole is static."""
        return fr.omega_c / 2.0 + self.half_detuning

    def with_detuning(self, half_detuning: float) -> "AxializationDrive":
        return self.model_copy(update={"half_detuning": half_detuning})


class ExcitationDrive(BaseModel):
    """Dipolar excitation F·e^{iω_d t} near one of the radial mode families.

    ``rotating_detuning`` is δ in the rotating frame. For the cyclotron side the drive sits at
    ω_d = ω_c/2 + Δ + ω₁ + δ; for the magnetron side at ω_d = ω_c/2 + Δ − ω₁ + δ.
    """

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "force_amplitude": 1.0,
                "rotating_detuning": 0.0,
                "family": "cyclotron",
                "polarization": "rotating",
            }
        },
    )

    force_amplitude: float = Field(ge=0.0, description="F as an acceleration in m/s²")
    rotating_detuning: float = Field(default=0.0, description="δ in rad/s")
    family: ModeFamily = ModeFamily.CYCLOTRON
    polarization: Polarization = Polarization.ROTATING

    def lab_frequency(self, fr: TrapFrequencies, drive: AxializationDrive) -> float:
        """Laboratory drive frequency ω_d in rad/s."""
        side = 1.0 if self.family == ModeFamily.CYCLOTRON else -1.0
        return drive.rotating_frequency(fr) + side * fr.omega_1 + self.rotating_detuning

    @classmethod
    def at_lab_frequency(
        cls,
        omega_d: float,
        fr: TrapFrequencies,
        drive: AxializationDrive,
        force_amplitude: float,
        family: ModeFamily = ModeFamily.CYCLOTRON,
        polarization: Polarization = Polarization.ROTATING,
    ) -> "ExcitationDrive":
        """Excitation at a given lab frequency; δ = ω_d − ω_c/2 − Δ ∓ ω₁."""
        side = 1.0 if family == ModeFamily.CYCLOTRON else -1.0
        return cls(
            force_amplitude=force_amplitude,
            rotating_detuning=omega_d - drive.rotating_frequency(fr) - side * fr.omega_1,
            family=family,
            polarization=polarization,
        )


@dataclass(frozen=True)
class ModeSolution:
    """One motional component of the axialized ion.

    ``dominance`` is this component's amplitude over the larger of the two components
    belonging to the same free mode: 1.0 marks the major component.
    """

    delta0: float
    gamma0: float
    lab_frequency: float
    branch: Branch
    mode_family: ModeFamily
    dominance: float

    @property
    def is_thick(self) -> bool:
        return self.dominance >= 0.5

    @property
    def complex_frequency(self) -> complex:
        """Lab frequency plus i·damping (e^{iωt} convention)."""
        return complex(self.lab_frequency, self.gamma0)


@dataclass(frozen=True)
class ResponseSolution:
    """Steady-state amplitudes of the driven (A) and indirectly driven (B) components."""

    A: complex
    B: complex
    C_m: complex
    C_c: complex

    @property
    def phase_A(self) -> float:
        return math.atan2(self.A.imag, self.A.real)

    @property
    def phase_B(self) -> float:
        return math.atan2(self.B.imag, self.B.real)
