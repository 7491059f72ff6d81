"""
Steady-state response of the axialized, laser-cooled ion to a dipolar excitation.

In the frame rotating at ω_r = ω_c/2 + Δ the driven component A and the indirectly driven
component B obey

    C_m·A + ε·B* = F
    ε·A + C_c·B* = 0

so that A = F·C_c/(C_m·C_c − ε²) and B = F·ε/(ε² − C_m*·C_c*). The coefficients depend on the
excitation side: near ω_c′ (the default) the drive sits at ω_c/2 + Δ + ω₁ + δ, near ω_m at
ω_c/2 + Δ − ω₁ + δ.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from src.models.errors import SingularResponseError
from src.models.physics_types import (
    AxializationDrive,
    CoolingCoefficients,
    ExcitationDrive,
    ModeFamily,
    ResponseSolution,
    TrapFrequencies,
)

logger = logging.getLogger(__name__)

# |C_m·C_c − ε²| below this fraction of ω₁⁴ is treated as an undamped resonance.
DEFAULT_SINGULAR_FLOOR = 1e-12


def coupling_coefficients(
    co: CoolingCoefficients,
    fr: TrapFrequencies,
    drive: AxializationDrive,
    delta: complex,
    family: ModeFamily = ModeFamily.CYCLOTRON,
) -> Tuple[complex, complex]:
    """
    Rotating-frame coefficients (C_m, C_c) at detuning δ.

    δ may be complex: a free mode δ₀ + iγ₀ makes C_m·C_c = ε² exactly.
    """
    w1 = fr.omega_1
    half_detuning = drive.half_detuning
    if ModeFamily(family) == ModeFamily.CYCLOTRON:
        c_m = w1 * (-2.0 * delta + 1j * co.beta - 2.0 * half_detuning - 1j * co.M)
        c_c = w1 * (-2.0 * delta + 1j * co.beta + 2.0 * half_detuning + 1j * co.M)
    else:
        c_m = w1 * (2.0 * delta - 1j * co.beta + 2.0 * half_detuning - 1j * co.M)
        c_c = w1 * (2.0 * delta - 1j * co.beta - 2.0 * half_detuning + 1j * co.M)
    return complex(c_m), complex(c_c)


def response(
    co: CoolingCoefficients,
    fr: TrapFrequencies,
    drive: AxializationDrive,
    exc: ExcitationDrive,
    singular_floor: float = DEFAULT_SINGULAR_FLOOR,
) -> ResponseSolution:
    """
    Steady-state amplitudes for one excitation.

    Args:
        co: Laser-cooling coefficients
        fr: Trap frequencies
        drive: Axialization drive (ε, Δ)
        exc: Excitation (F, δ, side)
        singular_floor: Relative floor on |C_m·C_c − ε²| in units of ω₁⁴

    Returns:
        ResponseSolution with A, B in metres

    Raises:
        SingularResponseError: When the drive sits exactly on an undamped free mode
    """
    c_m, c_c = coupling_coefficients(co, fr, drive, exc.rotating_detuning, exc.family)
    eps = drive.epsilon
    determinant = c_m * c_c - eps ** 2
    if abs(determinant) <= singular_floor * fr.omega_1 ** 4:
        raise SingularResponseError(
            f"singular response at δ={exc.rotating_detuning!r} rad/s: |C_m·C_c − ε²| = {abs(determinant):.3e} "
            f"(undamped resonance)"
        )

    force = exc.force_amplitude
    amplitude_a = force * c_c / determinant
    amplitude_b = force * eps / (eps ** 2 - c_m.conjugate() * c_c.conjugate())
    return ResponseSolution(A=complex(amplitude_a), B=complex(amplitude_b), C_m=c_m, C_c=c_c)


@dataclass(frozen=True)
class PhasePoint:
    """One row of a phase sweep."""

    delta: float
    arg_A: float
    arg_B: float
    abs_A: float
    abs_B: float


def phase_sweep(
    co: CoolingCoefficients,
    fr: TrapFrequencies,
    drive: AxializationDrive,
    force_amplitude: float,
    delta_grid: Sequence[float],
    family: ModeFamily = ModeFamily.CYCLOTRON,
) -> List[PhasePoint]:
    """
    Amplitude and phase of both components across a sweep of the excitation detuning δ.

    Arg(A) is reported on (−π, π]. Arg(B) is unwrapped along the grid since B's phase
    can wind through the double resonance.
    """
    grid = np.asarray(delta_grid, dtype=float)
    if grid.size > 1 and not (np.all(np.diff(grid) > 0) or np.all(np.diff(grid) < 0)):
        raise ValueError("delta_grid must be strictly monotone")

    solutions = [
        response(
            co, fr, drive,
            ExcitationDrive(force_amplitude=force_amplitude, rotating_detuning=float(d), family=family),
        )
        for d in grid
    ]
    arg_b = np.unwrap([math.atan2(s.B.imag, s.B.real) for s in solutions]) if solutions else []

    return [
        PhasePoint(
            delta=float(d),
            arg_A=s.phase_A,
            arg_B=float(phase_b),
            abs_A=abs(s.A),
            abs_B=abs(s.B),
        )
        for d, s, phase_b in zip(grid, solutions, arg_b)
    ]


@dataclass(frozen=True)
class ResponseGrid:
    """Amplitude and phase surfaces over (Δ, δ), indexed [i_Delta, i_delta].

    Singular cells hold nan.
    """

    Delta_grid: np.ndarray
    delta_grid: np.ndarray
    abs_A: np.ndarray
    arg_A: np.ndarray
    abs_B: np.ndarray
    arg_B: np.ndarray
    singular_cells: int


def response_grid(
    co: CoolingCoefficients,
    fr: TrapFrequencies,
    drive_template: AxializationDrive,
    force_amplitude: float,
    Delta_grid: Sequence[float],
    delta_grid: Sequence[float],
    family: ModeFamily = ModeFamily.CYCLOTRON,
) -> ResponseGrid:
    """Evaluate the response over a grid of drive half-detunings Δ and excitation detunings δ."""
    big_deltas = np.asarray(Delta_grid, dtype=float)
    small_deltas = np.asarray(delta_grid, dtype=float)
    shape = (big_deltas.size, small_deltas.size)
    abs_a = np.full(shape, np.nan)
    arg_a = np.full(shape, np.nan)
    abs_b = np.full(shape, np.nan)
    arg_b = np.full(shape, np.nan)
    singular = 0

    for i, half_detuning in enumerate(big_deltas):
        drive = drive_template.with_detuning(float(half_detuning))
        for j, delta in enumerate(small_deltas):
            exc = ExcitationDrive(force_amplitude=force_amplitude, rotating_detuning=float(delta), family=family)
            try:
                solution = response(co, fr, drive, exc)
            except SingularResponseError as e:
                singular += 1
                logger.warning(f"Response cell (Δ={half_detuning:.6e}, δ={delta:.6e}) skipped: {e}")
                continue
            abs_a[i, j] = abs(solution.A)
            arg_a[i, j] = solution.phase_A
            abs_b[i, j] = abs(solution.B)
            arg_b[i, j] = solution.phase_B

    return ResponseGrid(
        Delta_grid=big_deltas,
        delta_grid=small_deltas,
        abs_A=abs_a,
        arg_A=arg_a,
        abs_B=abs_b,
        arg_B=arg_b,
        singular_cells=singular,
    )


def amplitude_ratio(
    co: CoolingCoefficients,
    fr: TrapFrequencies,
    drive: AxializationDrive,
    mode_frequency: complex,
) -> float:
    """
    |B/A| = ε/|C_c| for a free mode given by its lab frequency near ω_c′.

    mode_frequency may carry the damping as an imaginary part (ω + iγ); δ is taken
    relative to ω_c/2 + Δ + ω₁.
    """
    if drive.epsilon == 0.0:
        return 0.0
    delta = mode_frequency - drive.rotating_frequency(fr) - fr.omega_1
    _, c_c = coupling_coefficients(co, fr, drive, delta)
    if c_c == 0.0:
        return math.inf
    return drive.epsilon / abs(c_c)


def component_ratio(
    co: CoolingCoefficients,
    fr: TrapFrequencies,
    drive: AxializationDrive,
    delta: complex,
    family: ModeFamily = ModeFamily.CYCLOTRON,
) -> float:
    """
    Free-mode ratio |B/A| as sqrt(|C_m|/|C_c|).

    On a free mode C_m·C_c = ε², so this equals both ε/|C_c| and |C_m|/ε while staying
    exact as ε → 0.
    """
    c_m, c_c = coupling_coefficients(co, fr, drive, delta, family)
    if c_c == 0.0:
        return 1.0 if c_m == 0.0 else math.inf
    return math.sqrt(abs(c_m) / abs(c_c))


def half_width(deltas: Sequence[float], amplitudes: Sequence[float]) -> float:
    """
    Half-width at half-maximum of |A|² from a sampled sweep.

    Args:
        deltas: Monotone increasing excitation detunings
        amplitudes: |A| at each detuning

    Returns:
        HWHM in the units of deltas

    Raises:
        ValueError: If the peak's half-maximum is not crossed on both sides
    """
    x = np.asarray(deltas, dtype=float)
    power = np.asarray(amplitudes, dtype=float) ** 2
    peak = int(np.argmax(power))
    half = power[peak] / 2.0

    left = np.nonzero(power[:peak] < half)[0]
    right = np.nonzero(power[peak:] < half)[0]
    if left.size == 0 or right.size == 0:
        raise ValueError("sweep does not cross half maximum on both sides of the peak")

    i = left[-1]
    x_left = np.interp(half, [power[i], power[i + 1]], [x[i], x[i + 1]])
    j = peak + right[0]
    x_right = np.interp(half, [power[j], power[j - 1]], [x[j], x[j - 1]])
    return float(x_right - x_left) / 2.0
