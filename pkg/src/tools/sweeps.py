"""
Command builders behind the penning-axial CLI.

Each cmd_* function turns a RunConfig into a SweepTable whose metadata carries the fully
resolved parameter set.
"""

import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src import __version__
from src.models.constants import KHZ, MICROMETRE, rad_s_to_khz
from src.models.errors import ConfigError, IndeterminateRegimeError
from src.models.physics_types import ModeFamily, ModeSolution
from src.models.presets import PresetName
from src.models.run_config import ResolvedRun, RunConfig, SweepTable, load_run_config, resolve_run
from src.oracle.lab_frame import RadialState, integrate, make_rhs, write_trajectory_csv
from src.physics.axialization import avoided_crossing_gap, classify_regime, sweep_modes
from src.physics.drive_response import response_grid
from src.physics.laser_cooling import cooling_map
from src.tools.grid_runner import grid_runner
from src.tools.verification import has_custom_sections, run_checks

logger = logging.getLogger(__name__)

UNITS = {
    "kHz": "ordinary frequency, ω/2π in kHz",
    "gamma": "s⁻¹",
    "alpha": "s⁻²",
    "beta": "s⁻¹",
    "absA": "m",
    "absB": "m",
    "argA": "rad",
    "argB": "rad",
    "y0_um": "μm",
}


def _resolved_parameters(run: ResolvedRun) -> Dict[str, Any]:
    """SI/rad·s⁻¹ values of everything the command computed with."""
    resolved: Dict[str, Any] = {
        "trap": run.trap.model_dump(mode="json"),
        "frequencies": asdict(run.frequencies),
    }
    if run.coefficients is not None:
        resolved["coefficients"] = asdict(run.coefficients)
    if run.drive is not None:
        resolved["drive"] = run.drive.model_dump(mode="json", exclude_none=True)
    if run.laser is not None:
        resolved["laser"] = run.laser.model_dump(mode="json")
    return resolved


def _regime(run: ResolvedRun) -> str:
    if run.drive is None or run.coefficients is None:
        return "none"
    try:
        return classify_regime(run.coefficients, run.frequencies, run.drive).value
    except IndeterminateRegimeError:
        return "indeterminate"


def build_meta(command: str, config: RunConfig, run: Optional[ResolvedRun] = None, **extra: Any) -> Dict[str, Any]:
    """Metadata block shared by every table."""
    meta: Dict[str, Any] = {
        "command": command,
        "version": __version__,
        "preset": config.preset,
        "config": config.model_dump(mode="json", exclude_none=True, exclude={"output"}),
        "units": UNITS,
    }
    if run is not None:
        meta["resolved"] = _resolved_parameters(run)
        meta["regime"] = _regime(run)
    meta.update(extra)
    return meta


def _chunks(values: Sequence[float], count: int) -> List[List[float]]:
    size = max(1, -(-len(values) // max(1, count)))
    return [list(values[i:i + size]) for i in range(0, len(values), size)]


def cmd_freqs(config: RunConfig) -> SweepTable:
    """The five trap frequencies in kHz."""
    run = resolve_run(config)
    fr = run.frequencies
    columns = ["omega_z_kHz", "omega_c_kHz", "omega_1_kHz", "omega_c_prime_kHz", "omega_m_kHz"]
    row = [rad_s_to_khz(v) for v in (fr.omega_z, fr.omega_c, fr.omega_1, fr.omega_c_prime, fr.omega_m)]
    logger.info(f"Trap frequencies (kHz): {dict(zip(columns, row))}")
    return SweepTable(columns=columns, rows=[row], meta=build_meta("freqs", config, run))


def cmd_cooling_map(config: RunConfig) -> SweepTable:
    """Both cooling rates over the (y0, Δ_L) grid, one row per cell."""
    config.require("trap", "laser", "cooling_map")
    run = resolve_run(config)
    if run.laser is None:
        raise ConfigError("cooling-map needs physical laser parameters (transition, detuning, offset, waist)")

    section = config.cooling_map
    surface = cooling_map(run.trap, run.laser, np.array(section.y0_grid()), np.array(section.detuning_grid()))

    rows = []
    for i, y0 in enumerate(surface.y0_grid):
        for j, detuning in enumerate(surface.detuning_grid):
            rows.append([
                float(y0 / MICROMETRE),
                rad_s_to_khz(float(detuning)),
                float(surface.gamma_cyc[i, j]),
                float(surface.gamma_mag[i, j]),
                float(surface.alpha[i, j]),
                float(surface.beta[i, j]),
            ])
    both = int(np.count_nonzero(surface.both_cooled()))
    return SweepTable(
        columns=["y0_um", "detuning_kHz", "gamma_cyc", "gamma_mag", "alpha", "beta"],
        rows=rows,
        meta=build_meta("cooling-map", config, run, both_cooled_cells=both),
    )


def _axial_rows(
    solutions: Sequence[ModeSolution], half_detuning: float, family: ModeFamily, free_frequency: float
) -> List[list]:
    return [
        [
            rad_s_to_khz(half_detuning),
            s.branch.value,
            s.mode_family.value,
            rad_s_to_khz(s.delta0),
            s.gamma0,
            rad_s_to_khz(s.lab_frequency - free_frequency),
            s.dominance,
        ]
        for s in solutions
        if s.mode_family == family
    ]


def cmd_axial_sweep(config: RunConfig) -> SweepTable:
    """Dressed-mode shifts and dampings over the Δ grid for the configured family."""
    config.require("trap", "laser", "axialization")
    run = resolve_run(config)
    co, fr, drive = run.coefficients, run.frequencies, run.drive
    family = config.axialization.family
    grid = config.axialization.delta_grid()

    chunks = _chunks(grid, grid_runner.workers)
    swept = grid_runner.map(lambda chunk: sweep_modes(co, fr, drive, chunk), chunks)
    per_point = [solutions for block in swept for solutions in block]

    free = fr.omega_c_prime if family == ModeFamily.CYCLOTRON else fr.omega_m
    rows = []
    for half_detuning, solutions in zip(grid, per_point):
        rows.extend(_axial_rows(solutions, half_detuning, family, free))

    gap = rad_s_to_khz(avoided_crossing_gap(co, fr, drive.with_detuning(0.0)))
    logger.info(f"Axial sweep: {len(grid)} detunings, family={family.value}, gap={gap:.6g} kHz")
    return SweepTable(
        columns=["Delta_kHz", "branch", "family", "delta0_kHz", "gamma0", "lab_freq_shift_kHz", "dominance"],
        rows=rows,
        meta=build_meta("axial-sweep", config, run, gap_kHz=gap),
    )


def cmd_response(config: RunConfig) -> SweepTable:
    """|A|, Arg A, |B|, Arg B over the (Δ, δ) grid; singular cells are emitted as nan."""
    config.require("trap", "laser", "axialization", "excitation")
    run = resolve_run(config)
    co, fr, drive = run.coefficients, run.frequencies, run.drive
    excitation = config.excitation
    big_grid = config.axialization.delta_grid()
    small_grid = excitation.delta_grid()

    def row_block(half_detuning: float):
        return response_grid(co, fr, drive, excitation.force, [half_detuning], small_grid, excitation.family)

    blocks = grid_runner.map(row_block, big_grid)
    rows = []
    singular = 0
    for block in blocks:
        singular += block.singular_cells
        for j, delta in enumerate(block.delta_grid):
            rows.append([
                rad_s_to_khz(float(block.Delta_grid[0])),
                rad_s_to_khz(float(delta)),
                float(block.abs_A[0, j]),
                float(block.arg_A[0, j]),
                float(block.abs_B[0, j]),
                float(block.arg_B[0, j]),
            ])
    if singular:
        logger.warning(f"{singular} singular response cell(s) emitted as nan")
    return SweepTable(
        columns=["Delta_kHz", "delta_drive_kHz", "absA", "argA", "absB", "argB"],
        rows=rows,
        meta=build_meta("response", config, run, singular_cells=singular, family=excitation.family.value),
    )


def cmd_verify(config: RunConfig) -> Tuple[SweepTable, bool]:
    """
    Run the verification suite.

    Returns:
        The report table and whether every check passed
    """
    results = run_checks(config)
    rows = [
        [r.name, "pass" if r.passed else "fail", r.measured, r.threshold, r.detail]
        for r in results
    ]
    passed = all(r.passed for r in results)
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.error(f"Verification failed: {', '.join(failed)}")
    else:
        logger.info(f"All {len(results)} checks passed")
    table = SweepTable(
        columns=["check", "passed", "measured", "threshold", "detail"],
        rows=rows,
        meta=build_meta(
            "verify", config, passed=passed, suite="configured" if has_custom_sections(config) else "presets"
        ),
    )
    return table, passed


TRAJECTORY_DRIVE_PERIODS = 400
TRAJECTORY_SAMPLES_PER_PERIOD = 16


def dump_trajectory(config: RunConfig, path: str) -> Path:
    """
    Lab-frame motion under the verified parameters, written as CSV (t,x,y,vx,vy).

    The ion starts on a 1 μm modified-cyclotron orbit with the drive at 1% of the largest
    configured |Δ|. Without trap, laser and axialization sections the fig5d preset is used.
    """
    source = config if has_custom_sections(config) else load_run_config(preset=PresetName.FIG5D.value)
    run = resolve_run(source)
    span = max((abs(d) for d in source.axialization.delta_grid()), default=0.0)
    drive = run.drive.with_detuning(0.01 * span if span > 0.0 else 0.1 * KHZ)

    period = 2.0 * np.pi / drive.drive_frequency(run.frequencies)
    samples = TRAJECTORY_DRIVE_PERIODS * TRAJECTORY_SAMPLES_PER_PERIOD
    t_eval = np.linspace(0.0, TRAJECTORY_DRIVE_PERIODS * period, samples + 1)
    logger.info(
        f"Integrating {TRAJECTORY_DRIVE_PERIODS} drive periods at Δ/2π = {rad_s_to_khz(drive.half_detuning):.4g} kHz"
    )

    trajectory = integrate(
        RadialState.on_mode(MICROMETRE, run.frequencies.omega_c_prime),
        make_rhs(run.frequencies, run.coefficients, drive),
        (0.0, float(t_eval[-1])),
        tol=config.verify.tolerance,
        t_eval=t_eval,
    )
    return write_trajectory_csv(trajectory, path)
