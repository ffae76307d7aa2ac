from __future__ import annotations

import argparse
import sys
from typing import Sequence

from app.commands import COMMANDS
from app.core.config import settings
from app.core.errors import SolverError
from app.core.run_log import RunLogger, to_json_safe
from app.schemas.response import ErrorResponse


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vp_exact", description="Exact video poker solver")
    parser.add_argument("--workers", "-j", type=int, default=None,
                        help=f"worker processes (default: {settings.workers})")
    parser.add_argument("--no-progress", action="store_true", help="disable progress bars")
    parser.add_argument("--run-id", default=None, help="run id for the step logs")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = create_parser()
    args = parser.parse_args(argv)
    if args.no_progress:
        settings.progress = False
    if args.workers is not None and args.workers < 1:
        parser.error("--workers must be >= 1")

    logger = RunLogger(command=args.command, run_id=args.run_id)
    try:
        return args.handler(args, logger)
    except SolverError as exc:
        payload = ErrorResponse(code=exc.exit_code, message=exc.message, details=to_json_safe(exc.details))
        print(payload.model_dump_json(), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
