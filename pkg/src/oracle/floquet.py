"""
Floquet analysis of the lab-frame system over one axialization period.

The radial equations are linear with period T = 2π/ω_a. The monodromy matrix Φ(T) is built
column by column from four unit initial conditions; its eigenvalues λ give exponents
μ = log(λ)/T = iω − γ, with ω defined modulo ω_a. Exponents are matched to the closed-form
mode records, each record's lab frequency being a valid representative modulo ω_a.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import eigvals
from scipy.optimize import linear_sum_assignment

from src.models.errors import BranchAmbiguityError
from src.models.physics_types import AxializationDrive, CoolingCoefficients, ModeSolution, TrapFrequencies
from src.oracle.lab_frame import QuadrupoleModel, RadialState, default_rtol, integrate, make_rhs
from src.physics.axialization import solve_modes

logger = logging.getLogger(__name__)

# Candidates closer than this fraction of ω₁ count as the same (exactly degenerate) mode.
_IDENTICAL_CANDIDATES = 1e-12


@dataclass(frozen=True)
class MatchedMode:
    """A Floquet exponent assigned to one closed-form mode record."""

    solution: ModeSolution
    exponent: complex
    frequency: float
    damping: float
    frequency_error: float
    damping_error: float


@dataclass(frozen=True)
class MonodromyResult:
    """Floquet multipliers and exponents of one drive period, with their matches."""

    period: float
    monodromy_matrix: np.ndarray
    multipliers: np.ndarray
    floquet_exponents: np.ndarray
    matched_modes: List[MatchedMode]
    max_match_error: float

    @property
    def max_frequency_error(self) -> float:
        return max(m.frequency_error for m in self.matched_modes)

    @property
    def max_damping_error(self) -> float:
        return max(m.damping_error for m in self.matched_modes)

    @property
    def damping_sum(self) -> float:
        """Σγ over all four exponents; equals 2β from the trace of the flow."""
        return float(-np.sum(self.floquet_exponents.real))


def _wrap(values: np.ndarray, omega_a: float) -> np.ndarray:
    """Map frequency differences into [−ω_a/2, ω_a/2)."""
    return (values + omega_a / 2.0) % omega_a - omega_a / 2.0


def monodromy_matrix(
    fr: TrapFrequencies,
    co: CoolingCoefficients,
    drive: AxializationDrive,
    tol: Optional[float] = None,
    quadrupole: QuadrupoleModel = QuadrupoleModel.FULL,
) -> np.ndarray:
    """
    Φ(T) in scaled coordinates (x, y, vx/ω₁, vy/ω₁).

    Each column is one integration from a unit initial condition.
    """
    omega_a = drive.drive_frequency(fr)
    if omega_a <= 0.0:
        raise ValueError(f"drive frequency must be positive, got ω_a={omega_a!r}")
    period = 2.0 * np.pi / omega_a
    rtol = default_rtol() if tol is None else tol
    rhs = make_rhs(fr, co, drive, quadrupole=quadrupole)
    scale = np.array([1.0, 1.0, fr.omega_1, fr.omega_1])

    columns = []
    for i in range(4):
        unit = np.zeros(4)
        unit[i] = 1.0
        trajectory = integrate(
            RadialState.from_array(unit * scale), rhs, (0.0, period), tol=rtol, t_eval=[period], atol=rtol * 1e-3
        )
        columns.append(trajectory.states[-1] / scale)
    return np.column_stack(columns)


def match_exponents(
    exponents: np.ndarray,
    candidates: Sequence[ModeSolution],
    omega_a: float,
) -> List[MatchedMode]:
    """
    Assign exponents to mode records by minimum total complex distance.

    Raises:
        BranchAmbiguityError: If two distinct candidates lie closer to each other than twice
            the larger of their match errors
    """
    frequencies = exponents.imag
    dampings = -exponents.real
    cand_freq = np.array([c.lab_frequency for c in candidates])
    cand_damp = np.array([c.gamma0 for c in candidates])

    freq_gap = _wrap(frequencies[:, None] - cand_freq[None, :], omega_a)
    cost = np.hypot(freq_gap, dampings[:, None] - cand_damp[None, :])
    rows, cols = linear_sum_assignment(cost)

    matched = {}
    for r, c in zip(rows, cols):
        matched[c] = MatchedMode(
            solution=candidates[c],
            exponent=complex(exponents[r]),
            frequency=float(cand_freq[c] + freq_gap[r, c]),
            damping=float(dampings[r]),
            frequency_error=float(abs(freq_gap[r, c])),
            damping_error=float(abs(dampings[r] - cand_damp[c])),
        )

    identical = _IDENTICAL_CANDIDATES * max(1.0, float(np.max(np.abs(cand_freq))))
    for i in range(len(candidates)):
        for j in range(i + 1, len(candidates)):
            separation = float(np.hypot(
                _wrap(np.array(cand_freq[i] - cand_freq[j]), omega_a), cand_damp[i] - cand_damp[j]
            ))
            if separation <= identical:
                continue
            errors = [cost[r, c] for r, c in zip(rows, cols) if c in (i, j)]
            if separation < 2.0 * max(errors):
                raise BranchAmbiguityError(
                    f"Floquet matching ambiguous: candidates {i} and {j} are {separation:.3e} rad/s apart "
                    f"but match errors reach {max(errors):.3e} rad/s"
                )

    return [matched[c] for c in range(len(candidates))]


def monodromy(
    fr: TrapFrequencies,
    co: CoolingCoefficients,
    drive: AxializationDrive,
    tol: Optional[float] = None,
    quadrupole: QuadrupoleModel = QuadrupoleModel.FULL,
) -> MonodromyResult:
    """
    Floquet exponents of the exact lab-frame system, matched against solve_modes.

    Args:
        fr: Trap frequencies
        co: Laser-cooling coefficients
        drive: Axialization drive (ω_a > 0)
        tol: Integration tolerance
        quadrupole: Full quadrupole or co-rotating half

    Returns:
        MonodromyResult with four exponents and four matched mode records
    """
    omega_a = drive.drive_frequency(fr)
    matrix = monodromy_matrix(fr, co, drive, tol=tol, quadrupole=quadrupole)
    period = 2.0 * np.pi / omega_a
    multipliers = eigvals(matrix)
    exponents = np.log(multipliers.astype(complex)) / period

    matched = match_exponents(exponents, solve_modes(co, fr, drive), omega_a)
    max_error = max(float(np.hypot(m.frequency_error, m.damping_error)) for m in matched)
    logger.debug(
        f"Monodromy at Δ={drive.half_detuning:.6e}: exponents={np.round(exponents, 6)}, "
        f"max match error={max_error:.3e} rad/s"
    )
    return MonodromyResult(
        period=period,
        monodromy_matrix=matrix,
        multipliers=multipliers,
        floquet_exponents=exponents,
        matched_modes=matched,
        max_match_error=max_error,
    )


def counterrotating_error(
    fr: TrapFrequencies,
    co: CoolingCoefficients,
    drive: AxializationDrive,
    tol: Optional[float] = None,
) -> float:
    """
    Largest exponent shift caused by the counter-rotating half of the quadrupole.

    Both runs are matched to the same mode records, so the shift is taken record by record.
    """
    full = monodromy(fr, co, drive, tol=tol, quadrupole=QuadrupoleModel.FULL)
    co_rotating = monodromy(fr, co, drive, tol=tol, quadrupole=QuadrupoleModel.CO_ROTATING)
    shifts = [
        abs(complex(a.frequency, a.damping) - complex(b.frequency, b.damping))
        for a, b in zip(full.matched_modes, co_rotating.matched_modes)
    ]
    return float(max(shifts))


def equivalence_grid(span: float, points: int) -> np.ndarray:
    """
    Δ grid over [−span, span] that never samples Δ = 0.

    Odd grids are shifted by half a step; even grids already straddle zero. Δ = 0 is an
    exceptional point of the closed-form spectrum at critical coupling.
    """
    if points < 2:
        raise ValueError("equivalence grid needs at least two points")
    grid = np.linspace(-span, span, points)
    if points % 2 == 0:
        return grid
    return grid + (grid[1] - grid[0]) / 2.0
