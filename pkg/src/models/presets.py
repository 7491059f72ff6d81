"""Named run configurations for the standard parameter sets."""

from enum import Enum
from typing import Any, Dict


class PresetName(str, Enum):
    """Enum for shipped run presets."""
    FIG4 = "fig4"
    FIG5A = "fig5a"
    FIG5B = "fig5b"
    FIG5C = "fig5c"
    FIG5D = "fig5d"
    FIG6 = "fig6"
    FIG7_WEAK = "fig7-weak"
    FIG7_STRONG = "fig7-strong"


# Reference trap: ω_c = 380, ω₁ = 165 (×2π kHz).
_REFERENCE_TRAP = {"omega_c_khz": 380.0, "omega_1_khz": 165.0}

# α/β = 100 ×2π kHz with |M| = 0.1 ×2π kHz.
_FIG5_LASER = {"alpha_over_beta_khz": 100.0, "m_abs_khz": 0.1}


def _fig5(coupling_sq_over_m_sq: float, span_khz: float = 2.0) -> Dict[str, Any]:
    return {
        "trap": dict(_REFERENCE_TRAP),
        "laser": dict(_FIG5_LASER),
        "axialization": {
            "coupling_sq_over_m_sq": coupling_sq_over_m_sq,
            "delta_range_khz": [-span_khz, span_khz],
            "steps": 201,
            "family": "magnetron",
        },
    }


def _fig7(coupling_sq_over_m_sq: float) -> Dict[str, Any]:
    return {
        "trap": dict(_REFERENCE_TRAP),
        "laser": dict(_FIG5_LASER),
        "axialization": {
            "coupling_sq_over_m_sq": coupling_sq_over_m_sq,
            "delta_range_khz": [-2.0, 2.0],
            "steps": 41,
        },
        "excitation": {
            "force": 1.0,
            "delta_range_khz": [-2.0, 2.0],
            "steps": 201,
            "family": "cyclotron",
        },
    }


PRESET_CONFIG: Dict[PresetName, Dict[str, Any]] = {
    PresetName.FIG4: {
        "trap": {
            "endcap_voltage": 3.0,
            "axial_half_gap_um": 3535.534,
            "ring_radius_um": 5000.0,
            "magnetic_field": 0.98,
            "species": "ca40",
        },
        "laser": {
            "transition": "ca40_397",
            "detuning_khz": -10800.0,
            "beam_offset_um": -30.0,
            "beam_waist_um": 50.0,
            "peak_saturation": 0.1,
        },
        "cooling_map": {
            "y0_range_um": [-100.0, 100.0],
            "y0_steps": 41,
            "detuning_range_khz": [-43200.0, 43200.0],
            "detuning_steps": 41,
        },
    },
    PresetName.FIG5A: _fig5(0.01),
    PresetName.FIG5B: _fig5(1.0),
    PresetName.FIG5C: _fig5(1.05),
    PresetName.FIG5D: _fig5(100.0, span_khz=10.0),
    PresetName.FIG6: {
        "trap": dict(_REFERENCE_TRAP),
        # |M|² = 0.1 (2π kHz)²
        "laser": {"alpha_over_beta_khz": 10.0, "m_abs_khz": 0.31622776601683794},
        "axialization": {
            "coupling_sq_over_m_sq": 1.0,
            "delta_range_khz": [-2.0, 2.0],
            "steps": 201,
            "family": "magnetron",
        },
    },
    PresetName.FIG7_WEAK: _fig7(0.01),
    PresetName.FIG7_STRONG: _fig7(100.0),
}
