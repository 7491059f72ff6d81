import os
import sys
import argparse
import logging
from typing import Callable, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from src import __version__
from src.models.errors import ConfigError, PenningAxialError
from src.models.presets import PresetName
from src.models.run_config import RunConfig, SweepTable, load_run_config
from src.tools.grid_runner import grid_runner
from src.tools.sweeps import (
    cmd_axial_sweep,
    cmd_cooling_map,
    cmd_freqs,
    cmd_response,
    cmd_verify,
    dump_trajectory,
)
from src.tools.table_writer import write_table

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VERIFICATION = 2

COMMANDS: Dict[str, Callable[[RunConfig], SweepTable]] = {
    "freqs": cmd_freqs,
    "cooling-map": cmd_cooling_map,
    "axial-sweep": cmd_axial_sweep,
    "response": cmd_response,
}


def configure_logging(verbose: bool = False) -> None:
    """Log to stderr so tables on stdout stay machine-readable."""
    level_name = "DEBUG" if verbose else os.environ.get("PENNING_AXIAL_LOG_LEVEL", "INFO").upper()
    level = getattr(logging, level_name, logging.INFO)
    logging.basicConfig(
        level=level, stream=sys.stderr, format='%(asctime)s - %(levelname)s - %(message)s', force=True
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="penning-axial",
        description="Laser cooling and axialization of a single ion in a Penning trap: parameter sweeps and checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (merged over --preset when both are given)")
    common.add_argument(
        "--preset", help=f"named parameter set ({', '.join(p.value for p in PresetName)})"
    )
    common.add_argument("--out", help="output file (stdout when omitted)")
    common.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")
    common.add_argument("--workers", type=int, help="worker threads for grid evaluation")
    common.add_argument("--tolerance", type=float, help="oracle integration tolerance")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("freqs", parents=[common], help="trap eigenfrequencies")
    sub.add_parser("cooling-map", parents=[common], help="cooling rates over beam offset and laser detuning")
    sub.add_parser("axial-sweep", parents=[common], help="dressed-mode shifts and dampings over Δ")
    sub.add_parser("response", parents=[common], help="driven amplitude and phase over (Δ, δ)")
    verify = sub.add_parser("verify", parents=[common], help="closed-form identities and oracle agreement")
    verify.add_argument("--trajectory", help="also write a lab-frame trajectory CSV (t,x,y,vx,vy) to this path")
    return parser


def _load(args: argparse.Namespace) -> RunConfig:
    if args.config is None and args.preset is None:
        if args.command != "verify":
            raise ConfigError(f"{args.command} needs --config or --preset")
        config = RunConfig()
    else:
        config = load_run_config(path=args.config, preset=args.preset)

    overrides = config.model_dump()
    if args.out is not None:
        overrides["output"]["path"] = args.out
    if args.format is not None:
        overrides["output"]["format"] = args.format
    if args.tolerance is not None:
        overrides["verify"]["tolerance"] = args.tolerance
    if getattr(args, "trajectory", None) is not None:
        overrides["output"]["trajectory_path"] = args.trajectory
    return RunConfig.model_validate(overrides)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of penning-axial.

    Returns:
        0 on success, 1 on configuration errors, 2 on failed verification, 3 on numerical failures
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    try:
        if args.workers is not None:
            grid_runner.configure(args.workers)
        config = _load(args)
        logger.info(f"Running {args.command} (preset={config.preset})")

        if args.command == "verify":
            table, passed = cmd_verify(config)
            write_table(table, config.output.path, config.output.format)
            if config.output.trajectory_path is not None:
                dump_trajectory(config, config.output.trajectory_path)
            return EXIT_OK if passed else EXIT_VERIFICATION

        table = COMMANDS[args.command](config)
        write_table(table, config.output.path, config.output.format)
        return EXIT_OK

    except ValidationError as e:
        for error in e.errors():
            location = ".".join(str(part) for part in error["loc"])
            logger.error(f"Invalid configuration at '{location}': {error['msg']}")
        return EXIT_CONFIG
    except PenningAxialError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValueError as e:
        logger.error(f"Invalid argument: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
