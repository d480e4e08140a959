import argparse
import logging
from typing import Callable, Dict, Optional, Tuple

from eigendesign import __version__
from eigendesign.config import FigurePresets, load_config
from eigendesign.controllers.services import ExperimentService
from eigendesign.exceptions import EXIT_CHECK_FAILED
from eigendesign.middleware.error_handler import handle_exception
from eigendesign.schemas.base_schema import BaseResponse
from eigendesign.schemas.schema import RunConfig

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42
DEFAULT_TRIALS = 1000
PENCIL_OUT_DIR = "runs/pencil-suite"

CommandResult = Tuple[BaseResponse, int]


def _config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config, args.preset)
    if args.out:
        config = config.model_copy(update={"out_dir": args.out})
    return config


def run_command(args: argparse.Namespace, service: ExperimentService) -> CommandResult:
    return service.run(_config(args)), 0


def verify_krein_command(args: argparse.Namespace, service: ExperimentService) -> CommandResult:
    response = service.verify_krein(_config(args))
    return response, 0 if response.result.passed else EXIT_CHECK_FAILED


def pencil_suite_command(args: argparse.Namespace, service: ExperimentService) -> CommandResult:
    response = service.pencil_suite(args.seed, args.trials, args.out or PENCIL_OUT_DIR)
    return response, 0 if response.result.passed else EXIT_CHECK_FAILED


def export_command(args: argparse.Namespace, service: ExperimentService) -> CommandResult:
    return service.export(args.run_dir), 0


COMMANDS: Dict[str, Callable[[argparse.Namespace, ExperimentService], CommandResult]] = {
    "run": run_command,
    "verify-krein": verify_krein_command,
    "pencil-suite": pencil_suite_command,
    "export": export_command,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="DIR", help="output directory (overrides out_dir)")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")

    configured = argparse.ArgumentParser(add_help=False)
    configured.add_argument("--config", metavar="PATH", help="key = value run configuration")
    configured.add_argument("--preset", metavar="NAME", help=f"figure preset: {', '.join(FigurePresets.names())}")

    parser = argparse.ArgumentParser(prog="eigendesign", description="Two-phase eigenvalue design by projected gradient")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("run", parents=[common, configured], help="optimize a design and write its artifacts")
    sub.add_parser("verify-krein", parents=[common, configured], help="compare disk runs with the explicit 0-1 designs")
    pencils = sub.add_parser("pencil-suite", parents=[common], help="brute-force checks on random matrix pencils")
    pencils.add_argument("--seed", type=int, default=DEFAULT_SEED)
    pencils.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    export = sub.add_parser("export", parents=[common], help="regenerate heatmaps of a finished run")
    export.add_argument("run_dir", metavar="RUN_DIR")
    return parser


def dispatch(args: argparse.Namespace, service: Optional[ExperimentService] = None) -> CommandResult:
    service = service or ExperimentService()
    logger.debug("Dispatching %s", args.command)
    try:
        return COMMANDS[args.command](args, service)
    except Exception as exc:
        return handle_exception(args.command, exc)
