"""Lock-in style demodulation of a sampled trajectory at chosen mode frequencies."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.signal import butter, sosfiltfilt

from src.models.physics_types import TrapFrequencies
from src.oracle.lab_frame import Trajectory

logger = logging.getLogger(__name__)

FILTER_ORDER = 4


@dataclass(frozen=True)
class DemodulatedMode:
    """Complex envelope of u(t) = x + iy around one reference frequency.

    ``interior`` masks the samples far enough from both ends to be free of filter transients.
    """

    frequency: float
    t: np.ndarray
    envelope: np.ndarray
    phase: np.ndarray
    interior: np.ndarray
    steady_phase: float
    frequency_offset: float
    decay_rate: float


def _uniform_sample_rate(t: np.ndarray) -> float:
    steps = np.diff(t)
    if steps.size == 0 or not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
        raise ValueError("demodulation requires uniformly sampled trajectories")
    return 1.0 / steps[0]


def demodulate(
    trajectory: Trajectory,
    fr: TrapFrequencies,
    window: float,
    frequencies: Optional[Sequence[float]] = None,
    trim: Optional[float] = None,
) -> List[DemodulatedMode]:
    """
    Mix u(t) against e^{−iωt} and low-pass with a zero-phase Butterworth filter.

    Args:
        trajectory: Uniformly sampled trajectory, sample rate above 4·ω_c′/2π
        fr: Trap frequencies; the default references are ω_c′ and ω_m
        window: Averaging time in seconds; the filter cut-off is 1/window Hz
        frequencies: Reference angular frequencies (e.g. an excitation ω_d)
        trim: Time discarded at both ends before fitting; defaults to window

    Returns:
        One DemodulatedMode per reference frequency. Phases are relative to e^{iωt} at t = 0,
        i.e. to an excitation F·e^{iω_d t} when ω = ω_d.
    """
    t = np.asarray(trajectory.t, dtype=float)
    sample_rate = _uniform_sample_rate(t)
    if sample_rate <= 4.0 * fr.omega_c_prime / (2.0 * np.pi):
        raise ValueError(
            f"sample rate {sample_rate:.3e} Hz must exceed 4·ω_c′/2π = {4.0 * fr.omega_c_prime / (2.0 * np.pi):.3e} Hz"
        )
    if window <= 0.0:
        raise ValueError("window must be positive")

    references = [fr.omega_c_prime, fr.omega_m] if frequencies is None else list(frequencies)
    bandwidth = 2.0 * np.pi / window
    for i in range(len(references)):
        for j in range(i + 1, len(references)):
            if abs(references[i] - references[j]) < bandwidth:
                logger.warning(
                    f"Modes at {references[i]:.6e} and {references[j]:.6e} rad/s are closer than the "
                    f"window bandwidth {bandwidth:.3e} rad/s; envelopes will mix"
                )

    sos = butter(FILTER_ORDER, 1.0 / window, btype="low", fs=sample_rate, output="sos")
    margin = window if trim is None else trim
    interior = (t >= t[0] + margin) & (t <= t[-1] - margin)
    if np.count_nonzero(interior) < 2:
        raise ValueError("trajectory too short for the requested window and trim")

    u = trajectory.u
    modes = []
    for omega in references:
        mixed = u * np.exp(-1j * omega * t)
        filtered = sosfiltfilt(sos, mixed.real) + 1j * sosfiltfilt(sos, mixed.imag)
        envelope = np.abs(filtered)
        phase = np.unwrap(np.angle(filtered))

        t_in = t[interior]
        if np.any(envelope[interior] > 0.0):
            frequency_offset = float(np.polyfit(t_in, phase[interior], 1)[0])
            log_envelope = np.log(envelope[interior])
            decay_rate = float(-np.polyfit(t_in, log_envelope, 1)[0])
        else:
            frequency_offset = decay_rate = float("nan")

        tail = interior & (t >= t_in[-1] - (t_in[-1] - t_in[0]) / 4.0)
        steady_phase = float(np.angle(np.mean(filtered[tail])))

        modes.append(DemodulatedMode(
            frequency=float(omega),
            t=t,
            envelope=envelope,
            phase=phase,
            interior=interior,
            steady_phase=steady_phase,
            frequency_offset=frequency_offset,
            decay_rate=decay_rate,
        ))
    logger.debug(f"Demodulated {len(modes)} references at {sample_rate:.3e} Hz")
    return modes
