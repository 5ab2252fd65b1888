"""
Qubit Marginals - Command Line
Main entry point: logging setup, argument parsing and dispatch.

    python -m app.main <command> [options]

Reports go to stdout as JSON with sorted keys; logs go to stderr.
Exit codes: 0 success or feasible, 1 infeasible or violation found,
2 invalid input.
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app import __version__
from app.commands import experiments, marginals
from app.core.config import settings
from app.core.exceptions import InvalidInputError, MarginalsError
from app.services.storage_service import storage_service

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: str) -> None:
    """Configure root logging on stderr; later calls only change the level."""
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level.upper())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="marginals",
        description="Polygon inequalities for one-qubit marginals of pure states.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help=f"Logging level (default: {settings.log_level})",
    )

    subparsers = parser.add_subparsers(dest="command", required=True)
    marginals.register(subparsers)
    experiments.register(subparsers)
    return parser


def _error_payload(error: Exception) -> dict:
    payload = {"error": type(error).__name__, "message": str(error)}
    report = getattr(error, "report", None)
    if report is not None:
        payload["report"] = report.model_dump(mode="json")
    return payload


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command.

    Returns:
        Process exit code
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or settings.log_level)
    settings.log_config_status()
    logger.debug(f"🚀 Running {args.command}")

    try:
        outcome = args.func(args)
    except MarginalsError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        print(storage_service.dumps(_error_payload(e)))
        return e.exit_code
    except ValidationError as e:
        logger.error(f"❌ Invalid parameters: {e.error_count()} error(s)")
        print(storage_service.dumps({"error": "InvalidInputError", "message": str(e)}))
        return InvalidInputError.exit_code

    print(storage_service.dumps(outcome.report))
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
