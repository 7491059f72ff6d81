"""
Exact laboratory-frame radial equations of motion and their numerical integration.

    ẍ = −ω_c ẏ + (ω_z²/2) x − 2βẋ − 2αy − 2ε x cos(ω_a t) + F_x(t)
    ÿ = +ω_c ẋ + (ω_z²/2) y            + 2ε y cos(ω_a t) + F_y(t)

The magnetic field points along −z, so free ions circulate counter-clockwise. The laser acts
along x only, and the quadrupole keeps both its co- and counter-rotating halves unless
QuadrupoleModel.CO_ROTATING is selected.
"""

import logging
import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from src.models.errors import IntegrationError
from src.models.physics_types import (
    AxializationDrive,
    CoolingCoefficients,
    ExcitationDrive,
    LaserConfig,
    Polarization,
    TrapConfig,
    TrapFrequencies,
)
from src.physics.laser_cooling import scattering_force

logger = logging.getLogger(__name__)

RightHandSide = Callable[[float, np.ndarray], np.ndarray]

DEFAULT_RTOL = 1e-10


def default_rtol() -> float:
    """Oracle integration tolerance, overridable with PENNING_AXIAL_RTOL."""
    return float(os.getenv("PENNING_AXIAL_RTOL", str(DEFAULT_RTOL)))


class QuadrupoleModel(str, Enum):
    """Which part of the oscillating quadrupole acts on the ion."""
    FULL = "full"
    CO_ROTATING = "co_rotating"


class LaserModel(str, Enum):
    """Linearized laser force or the full scattering-rate force."""
    LINEAR = "linear"
    SCATTERING = "scattering"


@dataclass(frozen=True)
class RadialState:
    """Position (m) and velocity (m/s) of the ion in the radial plane at time t (s)."""

    x: float
    y: float
    vx: float
    vy: float
    t: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite([self.x, self.y, self.vx, self.vy, self.t])):
            raise ValueError(f"RadialState must be finite, got {self!r}")

    @property
    def u(self) -> complex:
        """Complex position x + iy."""
        return complex(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.vx, self.vy], dtype=float)

    @classmethod
    def from_array(cls, values: Sequence[float], t: float = 0.0) -> "RadialState":
        x, y, vx, vy = (float(v) for v in values)
        return cls(x=x, y=y, vx=vx, vy=vy, t=t)

    @classmethod
    def on_mode(cls, radius: float, omega: float, phase: float = 0.0) -> "RadialState":
        """Start on a circle of the given radius travelling at angular frequency ω."""
        return cls(
            x=radius * np.cos(phase),
            y=radius * np.sin(phase),
            vx=-radius * omega * np.sin(phase),
            vy=radius * omega * np.cos(phase),
        )


def make_rhs(
    fr: TrapFrequencies,
    co: CoolingCoefficients,
    drive: AxializationDrive,
    exc: Optional[ExcitationDrive] = None,
    quadrupole: QuadrupoleModel = QuadrupoleModel.FULL,
    laser_model: LaserModel = LaserModel.LINEAR,
    laser: Optional[LaserConfig] = None,
    cfg: Optional[TrapConfig] = None,
) -> RightHandSide:
    """
    Build f(t, [x, y, vx, vy]) for solve_ivp.

    Args:
        fr: Trap frequencies
        co: Linearized laser coefficients (ignored for the scattering model)
        drive: Axialization drive; ε = 0 disables it
        exc: Optional dipolar excitation
        quadrupole: Full oscillating quadrupole or its co-rotating half only
        laser_model: LINEAR (−2βẋ − 2αy) or SCATTERING (ħkR/m, needs laser and cfg)
        laser: Beam for the scattering model
        cfg: Trap configuration for the scattering model (ion mass)

    Returns:
        Right-hand side callable
    """
    if laser_model == LaserModel.SCATTERING and (laser is None or cfg is None):
        raise ValueError("the scattering laser model needs both laser and cfg")

    omega_c = fr.omega_c
    radial_spring = fr.omega_z ** 2 / 2.0
    eps = drive.epsilon
    omega_a = drive.drive_frequency(fr)
    alpha, beta = co.alpha, co.beta
    co_rotating_only = QuadrupoleModel(quadrupole) == QuadrupoleModel.CO_ROTATING

    if exc is not None:
        omega_d = exc.lab_frequency(fr, drive)
        force = exc.force_amplitude
        linear_drive = exc.polarization == Polarization.LINEAR
    else:
        omega_d = force = 0.0
        linear_drive = False

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        x, y, vx, vy = state
        ax = -omega_c * vy + radial_spring * x
        ay = omega_c * vx + radial_spring * y

        if laser_model == LaserModel.LINEAR:
            ax += -2.0 * beta * vx - 2.0 * alpha * y
        else:
            ax += scattering_force(laser, cfg, y, vx)

        if eps != 0.0:
            c, s = np.cos(omega_a * t), np.sin(omega_a * t)
            if co_rotating_only:
                ax += -eps * (x * c + y * s)
                ay += -eps * (x * s - y * c)
            else:
                ax += -2.0 * eps * x * c
                ay += 2.0 * eps * y * c

        if force != 0.0:
            if linear_drive:
                ax += 2.0 * force * np.cos(omega_d * t)
            else:
                ax += force * np.cos(omega_d * t)
                ay += force * np.sin(omega_d * t)

        return np.array([vx, vy, ax, ay])

    return rhs


def lab_frame_rhs(
    state: RadialState,
    fr: TrapFrequencies,
    co: CoolingCoefficients,
    drive: AxializationDrive,
    exc: Optional[ExcitationDrive] = None,
    quadrupole: QuadrupoleModel = QuadrupoleModel.FULL,
) -> np.ndarray:
    """Derivatives [ẋ, ẏ, ẍ, ÿ] at a single state."""
    rhs = make_rhs(fr, co, drive, exc, quadrupole=quadrupole)
    return rhs(state.t, state.as_array())


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution; states has shape (len(t), 4) with columns x, y, vx, vy."""

    t: np.ndarray
    states: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def vx(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def vy(self) -> np.ndarray:
        return self.states[:, 3]

    @property
    def u(self) -> np.ndarray:
        return self.states[:, 0] + 1j * self.states[:, 1]

    def final_state(self) -> RadialState:
        return RadialState.from_array(self.states[-1], t=float(self.t[-1]))


def integrate(
    state0: RadialState,
    rhs: RightHandSide,
    t_span: Tuple[float, float],
    tol: Optional[float] = None,
    t_eval: Optional[np.ndarray] = None,
    atol: Optional[float] = None,
) -> Trajectory:
    """
    Integrate with an adaptive 8th-order Dormand–Prince scheme.

    t_span may run backwards in time.

    Args:
        state0: Initial state; its t is ignored in favour of t_span[0]
        rhs: Right-hand side from make_rhs
        t_span: (t0, t1) in seconds
        tol: Relative tolerance; defaults to PENNING_AXIAL_RTOL or 1e-10
        t_eval: Sample times; the solver's own steps are returned when omitted
        atol: Absolute tolerance; defaults to tol·1e-3 times the largest initial component

    Returns:
        Trajectory at the requested times

    Raises:
        IntegrationError: If the solver fails (e.g. step-size underflow)
    """
    rtol = default_rtol() if tol is None else tol
    if rtol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {rtol!r}")
    y0 = state0.as_array()
    if atol is None:
        scale = float(np.max(np.abs(y0)))
        atol = rtol * 1e-3 * (scale if scale > 0.0 else 1.0)

    solution = solve_ivp(rhs, t_span, y0, method="DOP853", t_eval=t_eval, rtol=rtol, atol=atol)
    if not solution.success:
        logger.error(f"Integration over {t_span} failed: {solution.message}")
        raise IntegrationError(f"integration failed over t_span={t_span}: {solution.message}")

    logger.debug(f"Integrated {t_span} with {solution.nfev} evaluations")
    return Trajectory(t=solution.t, states=solution.y.T)


def write_trajectory_csv(trajectory: Trajectory, path: str) -> Path:
    """Dump a trajectory as CSV with columns t,x,y,vx,vy."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    table = np.column_stack([trajectory.t, trajectory.states])
    np.savetxt(out, table, fmt="%.9g", delimiter=",", header="t,x,y,vx,vy", comments="")
    logger.info(f"Trajectory with {len(trajectory.t)} samples written to {out}")
    return out
