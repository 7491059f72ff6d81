"""Physical constants, ion species, cooling transitions and unit conversions."""

import math
from enum import Enum
from typing import Any, Dict

# CODATA 2018 recommended values (SI). Pinned here rather than taken from
# scipy.constants, whose table follows the newest CODATA release.
ELEMENTARY_CHARGE = 1.602176634e-19  # C, exact
ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg
REDUCED_PLANCK = 1.054571817e-34  # J s, exact to the quoted digits

KHZ = 2.0 * math.pi * 1.0e3
MICROMETRE = 1.0e-6
NANOMETRE = 1.0e-9


def khz_to_rad_s(value_khz: float) -> float:
    """Convert an ordinary frequency in kHz to an angular frequency in rad/s."""
    return value_khz * KHZ


def rad_s_to_khz(value_rad_s: float) -> float:
    """Convert an angular frequency in rad/s to an ordinary frequency in kHz."""
    return value_rad_s / KHZ


class IonSpecies(str, Enum):
    """Enum for supported ion species."""
    CA40 = "ca40"
    BE9 = "be9"
    MG24 = "mg24"


# Mass number and charge state; mass = A·u, isotope mass defects ignored.
ION_CONFIG: Dict[IonSpecies, Dict[str, int]] = {
    IonSpecies.CA40: {"mass_number": 40, "charge_state": 1},
    IonSpecies.BE9: {"mass_number": 9, "charge_state": 1},
    IonSpecies.MG24: {"mass_number": 24, "charge_state": 1},
}


def ion_mass(species: IonSpecies) -> float:
    """Ion mass in kg."""
    return ION_CONFIG[IonSpecies(species)]["mass_number"] * ATOMIC_MASS_UNIT


def ion_charge(species: IonSpecies) -> float:
    """Ion charge in C."""
    return ION_CONFIG[IonSpecies(species)]["charge_state"] * ELEMENTARY_CHARGE


class TransitionPreset(str, Enum):
    """Enum for shipped Doppler-cooling transitions."""
    CA40_397 = "ca40_397"
    BE9_313 = "be9_313"
    MG24_280 = "mg24_280"


TRANSITION_CONFIG: Dict[TransitionPreset, Dict[str, Any]] = {
    TransitionPreset.CA40_397: {
        "wavelength": 396.959e-9,
        "linewidth": 2.0 * math.pi * 21.6e6,
        "species": IonSpecies.CA40,
    },
    TransitionPreset.BE9_313: {
        "wavelength": 313.132e-9,
        "linewidth": 2.0 * math.pi * 19.4e6,
        "species": IonSpecies.BE9,
    },
    TransitionPreset.MG24_280: {
        "wavelength": 279.635e-9,
        "linewidth": 2.0 * math.pi * 41.3e6,
        "species": IonSpecies.MG24,
    },
}
