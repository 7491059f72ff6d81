"""
Run configuration schema and the sweep-table model.

Config files are JSON documents in ordinary kHz, μm, nm, volts, tesla and m/s². Each section
resolves itself into the SI/rad·s⁻¹ domain types exactly once.
"""

import copy
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.constants import (
    MICROMETRE,
    NANOMETRE,
    TRANSITION_CONFIG,
    IonSpecies,
    TransitionPreset,
    khz_to_rad_s,
)
from src.models.errors import ConfigError
from src.models.physics_types import (
    AxializationDrive,
    CoolingCoefficients,
    LaserConfig,
    ModeFamily,
    TrapConfig,
    TrapFrequencies,
)
from src.models.presets import PRESET_CONFIG, PresetName
from src.physics.axialization import epsilon_from_voltage
from src.physics.laser_cooling import linearize_force
from src.physics.trap_core import compute_frequencies, frequencies_from_pair

logger = logging.getLogger(__name__)

Range = Tuple[float, float]

_TRAP_PAIR = ("omega_c_khz", "omega_1_khz")
_TRAP_PHYSICAL = ("endcap_voltage", "axial_half_gap_um", "ring_radius_um", "magnetic_field")
_LASER_PHYSICAL = ("detuning_khz", "beam_offset_um", "beam_waist_um", "peak_saturation")
_LASER_DIRECT = ("alpha", "beta")
_LASER_RATIO = ("alpha_over_beta_khz", "m_abs_khz")


def _linspace_khz(bounds: Range, steps: int) -> List[float]:
    low, high = bounds
    if steps == 1:
        return [khz_to_rad_s(low)]
    return [khz_to_rad_s(low + (high - low) * i / (steps - 1)) for i in range(steps)]


def _provided(section: BaseModel, names: Tuple[str, ...]) -> bool:
    return any(getattr(section, name) is not None for name in names)


class TrapSection(BaseModel):
    """Either a reference frequency pair or a physical trap."""

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={"example": {"omega_c_khz": 380.0, "omega_1_khz": 165.0}},
    )

    omega_c_khz: Optional[float] = Field(default=None, gt=0.0)
    omega_1_khz: Optional[float] = Field(default=None, ge=0.0)
    endcap_voltage: Optional[float] = Field(default=None, ge=0.0)
    axial_half_gap_um: Optional[float] = Field(default=None, gt=0.0)
    ring_radius_um: Optional[float] = Field(default=None, gt=0.0)
    magnetic_field: Optional[float] = Field(default=None, gt=0.0)
    species: IonSpecies = IonSpecies.CA40

    @model_validator(mode="after")
    def _one_entry_path(self) -> "TrapSection":
        has_pair = _provided(self, _TRAP_PAIR)
        has_physical = _provided(self, _TRAP_PHYSICAL)
        if has_pair == has_physical:
            raise ValueError("trap needs exactly one of (omega_c_khz, omega_1_khz) or the physical trap fields")
        names = _TRAP_PAIR if has_pair else _TRAP_PHYSICAL
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ValueError(f"trap is missing {', '.join(missing)}")
        return self

    @property
    def is_frequency_pair(self) -> bool:
        return self.omega_c_khz is not None

    def to_trap_config(self) -> TrapConfig:
        if self.is_frequency_pair:
            return TrapConfig.from_frequency_pair(
                khz_to_rad_s(self.omega_c_khz), khz_to_rad_s(self.omega_1_khz), species=self.species
            )
        return TrapConfig.for_species(
            self.species,
            endcap_voltage=self.endcap_voltage,
            axial_half_gap=self.axial_half_gap_um * MICROMETRE,
            ring_radius=self.ring_radius_um * MICROMETRE,
            magnetic_field=self.magnetic_field,
        )

    def to_frequencies(self) -> TrapFrequencies:
        if self.is_frequency_pair:
            return frequencies_from_pair(khz_to_rad_s(self.omega_c_khz), khz_to_rad_s(self.omega_1_khz))
        return compute_frequencies(self.to_trap_config())


class LaserSection(BaseModel):
    """Physical beam, direct (α, β), or the (α/β, |M|) parametrisation."""

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={
            "example": {
                "transition": "ca40_397",
                "detuning_khz": -10800.0,
                "beam_offset_um": -30.0,
                "beam_waist_um": 50.0,
                "peak_saturation": 0.1,
            }
        },
    )

    transition: Optional[TransitionPreset] = None
    detuning_khz: Optional[float] = None
    beam_offset_um: Optional[float] = None
    beam_waist_um: Optional[float] = Field(default=None, gt=0.0)
    peak_saturation: Optional[float] = Field(default=None, ge=0.0)
    linewidth_khz: Optional[float] = Field(default=None, gt=0.0)
    wavelength_nm: Optional[float] = Field(default=None, gt=0.0)
    alpha: Optional[float] = None
    beta: Optional[float] = None
    alpha_over_beta_khz: Optional[float] = None
    m_abs_khz: Optional[float] = Field(default=None, ge=0.0)

    @model_validator(mode="after")
    def _one_laser_mode(self) -> "LaserSection":
        modes = {
            "physical": _LASER_PHYSICAL,
            "direct (alpha, beta)": _LASER_DIRECT,
            "ratio (alpha_over_beta_khz, m_abs_khz)": _LASER_RATIO,
        }
        given = [name for name, fields in modes.items() if _provided(self, fields)]
        if len(given) != 1:
            raise ValueError(f"laser needs exactly one of {', '.join(modes)}; got {given or 'none'}")
        fields = modes[given[0]]
        missing = [n for n in fields if getattr(self, n) is None]
        if missing:
            raise ValueError(f"laser is missing {', '.join(missing)}")
        if given[0] == "physical":
            has_transition = self.transition is not None
            has_custom = self.linewidth_khz is not None and self.wavelength_nm is not None
            if not (has_transition or has_custom):
                raise ValueError("physical laser needs a transition or both linewidth_khz and wavelength_nm")
        return self

    @property
    def is_physical(self) -> bool:
        return self.detuning_khz is not None

    def to_laser_config(self) -> LaserConfig:
        if not self.is_physical:
            raise ConfigError("laser section does not describe a physical beam")
        defaults = TRANSITION_CONFIG[self.transition] if self.transition is not None else {}
        linewidth = khz_to_rad_s(self.linewidth_khz) if self.linewidth_khz is not None else defaults["linewidth"]
        wavelength = self.wavelength_nm * NANOMETRE if self.wavelength_nm is not None else defaults["wavelength"]
        return LaserConfig(
            detuning=khz_to_rad_s(self.detuning_khz),
            beam_offset=self.beam_offset_um * MICROMETRE,
            beam_waist=self.beam_waist_um * MICROMETRE,
            peak_saturation=self.peak_saturation,
            linewidth=linewidth,
            wavelength=wavelength,
        )

    def to_coefficients(self, cfg: TrapConfig, fr: TrapFrequencies) -> CoolingCoefficients:
        if self.is_physical:
            return linearize_force(self.to_laser_config(), cfg)
        if self.alpha is not None:
            return CoolingCoefficients.from_alpha_beta(self.alpha, self.beta, fr)
        try:
            return CoolingCoefficients.from_ratio(
                khz_to_rad_s(self.alpha_over_beta_khz), khz_to_rad_s(self.m_abs_khz), fr
            )
        except ValueError as e:
            raise ConfigError(str(e)) from e


class AxializationSection(BaseModel):
    """Drive strength (one of three forms) and the Δ grid."""

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={
            "example": {"coupling_sq_over_m_sq": 1.0, "delta_range_khz": [-2.0, 2.0], "steps": 201}
        },
    )

    epsilon_over_omega1_khz: Optional[float] = Field(default=None, ge=0.0)
    drive_voltage: Optional[float] = Field(default=None, ge=0.0)
    coupling_sq_over_m_sq: Optional[float] = Field(default=None, ge=0.0)
    delta_range_khz: Range = (-2.0, 2.0)
    steps: int = Field(default=201, ge=1)
    family: ModeFamily = ModeFamily.MAGNETRON

    @model_validator(mode="after")
    def _one_strength(self) -> "AxializationSection":
        given = [
            name for name in ("epsilon_over_omega1_khz", "drive_voltage", "coupling_sq_over_m_sq")
            if getattr(self, name) is not None
        ]
        if len(given) != 1:
            raise ValueError(
                "axialization needs exactly one of epsilon_over_omega1_khz, drive_voltage, coupling_sq_over_m_sq"
            )
        return self

    def to_drive(self, cfg: TrapConfig, fr: TrapFrequencies, co: CoolingCoefficients) -> AxializationDrive:
        """Drive at Δ = 0; sweeps set Δ per grid point."""
        if self.drive_voltage is not None:
            return AxializationDrive(
                epsilon=epsilon_from_voltage(self.drive_voltage, cfg), drive_voltage=self.drive_voltage
            )
        if self.epsilon_over_omega1_khz is not None:
            return AxializationDrive(epsilon=khz_to_rad_s(self.epsilon_over_omega1_khz) * fr.omega_1)
        return AxializationDrive(epsilon=math.sqrt(self.coupling_sq_over_m_sq) * abs(co.M) * fr.omega_1)

    def delta_grid(self) -> List[float]:
        return _linspace_khz(self.delta_range_khz, self.steps)


class ExcitationSection(BaseModel):
    """Dipolar excitation: force and the δ grid."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    force: float = Field(default=1.0, ge=0.0, description="acceleration amplitude in m/s²")
    delta_range_khz: Range = (-2.0, 2.0)
    steps: int = Field(default=201, ge=1)
    family: ModeFamily = ModeFamily.CYCLOTRON

    def delta_grid(self) -> List[float]:
        return _linspace_khz(self.delta_range_khz, self.steps)


class CoolingMapSection(BaseModel):
    """Grid of beam offsets and laser detunings."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    y0_range_um: Range = (-100.0, 100.0)
    y0_steps: int = Field(default=41, ge=1)
    detuning_range_khz: Range = (-43200.0, 43200.0)
    detuning_steps: int = Field(default=41, ge=1)

    def y0_grid(self) -> List[float]:
        low, high = self.y0_range_um
        n = self.y0_steps
        if n == 1:
            return [low * MICROMETRE]
        return [(low + (high - low) * i / (n - 1)) * MICROMETRE for i in range(n)]

    def detuning_grid(self) -> List[float]:
        return _linspace_khz(self.detuning_range_khz, self.detuning_steps)


class VerifySection(BaseModel):
    """Settings of the verification suite."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tolerance: Optional[float] = Field(default=None, gt=0.0, description="oracle rtol; env default when unset")
    equivalence_points: int = Field(default=21, ge=2)


class OutputSection(BaseModel):
    """Where and how tables are written."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    path: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    trajectory_path: Optional[str] = Field(default=None, description="lab-frame trajectory CSV written by verify")


class RunConfig(BaseModel):
    """Complete run configuration."""

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={
            "example": {
                "trap": {"omega_c_khz": 380.0, "omega_1_khz": 165.0},
                "laser": {"alpha_over_beta_khz": 100.0, "m_abs_khz": 0.1},
                "axialization": {"coupling_sq_over_m_sq": 100.0, "delta_range_khz": [-10.0, 10.0], "steps": 201},
                "output": {"format": "csv"},
            }
        },
    )

    trap: Optional[TrapSection] = None
    laser: Optional[LaserSection] = None
    axialization: Optional[AxializationSection] = None
    excitation: Optional[ExcitationSection] = None
    cooling_map: Optional[CoolingMapSection] = None
    verify: VerifySection = VerifySection()
    output: OutputSection = OutputSection()
    preset: Optional[str] = None

    def require(self, *sections: str) -> None:
        """Raise ConfigError naming every missing section."""
        missing = [name for name in sections if getattr(self, name) is None]
        if missing:
            raise ConfigError(f"configuration is missing section(s): {', '.join(missing)}")


class SweepTable(BaseModel):
    """Column schema, rows and the metadata block of an emitted table."""

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "columns": ["Delta_kHz", "branch"],
                "rows": [[-2.0, "plus"], [-2.0, "minus"]],
                "meta": {"command": "axial-sweep", "version": "1.0.0"},
            }
        },
    )

    columns: List[str]
    rows: List[List[Union[float, str, None]]]
    meta: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("columns")
    @classmethod
    def _unique_columns(cls, columns: List[str]) -> List[str]:
        if len(set(columns)) != len(columns):
            raise ValueError("column names must be unique")
        return columns

    @model_validator(mode="after")
    def _rectangular(self) -> "SweepTable":
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} values, expected {width}")
        return self


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge override into a copy of base; override wins on leaves."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def preset_config(name: str) -> Dict[str, Any]:
    """Raw config dictionary of a named preset."""
    try:
        preset = PresetName(name)
    except ValueError:
        known = ", ".join(p.value for p in PresetName)
        raise ConfigError(f"unknown preset '{name}' (known: {known})") from None
    return copy.deepcopy(PRESET_CONFIG[preset])


def load_run_config(path: Optional[str] = None, preset: Optional[str] = None) -> RunConfig:
    """
    Build a RunConfig from a preset, a JSON file, or the file merged over the preset.

    Args:
        path: JSON config file
        preset: Preset name

    Returns:
        Validated RunConfig

    Raises:
        ConfigError: Missing or unreadable file, invalid JSON, unknown preset
        pydantic.ValidationError: Field-level schema violations
    """
    raw: Dict[str, Any] = {}
    if preset is not None:
        raw = preset_config(preset)
        raw["preset"] = PresetName(preset).value

    if path is not None:
        config_path = Path(path)
        if not config_path.is_file():
            raise ConfigError(f"config file not found: {config_path}")
        try:
            document = json.loads(config_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON in {config_path}: {e}") from e
        if not isinstance(document, dict):
            raise ConfigError(f"config file {config_path} must hold a JSON object")
        raw = deep_merge(raw, document)

    logger.debug(f"Resolved configuration: {raw}")
    return RunConfig.model_validate(raw)


@dataclass(frozen=True)
class ResolvedRun:
    """Domain objects built from a RunConfig; absent sections stay None."""

    trap: TrapConfig
    frequencies: TrapFrequencies
    coefficients: Optional[CoolingCoefficients] = None
    drive: Optional[AxializationDrive] = None
    laser: Optional[LaserConfig] = None


def resolve_run(config: RunConfig) -> ResolvedRun:
    """
    Convert config units to SI and build the trap, cooling and drive objects.

    Raises:
        ConfigError: If the trap section is missing
        UnstableTrapError: If the trap does not confine radially
    """
    config.require("trap")
    trap = config.trap.to_trap_config()
    fr = config.trap.to_frequencies()

    co = laser = drive = None
    if config.laser is not None:
        co = config.laser.to_coefficients(trap, fr)
        if config.laser.is_physical:
            laser = config.laser.to_laser_config()
    if config.axialization is not None and co is not None:
        drive = config.axialization.to_drive(trap, fr, co)
    return ResolvedRun(trap=trap, frequencies=fr, coefficients=co, drive=drive, laser=laser)
