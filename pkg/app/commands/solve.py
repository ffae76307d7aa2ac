from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import TextIO

from app.commands.common import add_paytable_argument, load_paytable_step, solve_step
from app.core.config import settings
from app.core.errors import UsageError
from app.core.run_log import RunLogger
from app.services.distribution import build_distribution, write_distribution_csv
from app.services.expect import BACKENDS, SolvedTable
from app.services.export_service import export_workbook


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("solve", help="solve every equivalence class and write the 19-column CSV")
    add_paytable_argument(parser)
    parser.add_argument("--backend", choices=BACKENDS, default=None,
                        help=f"expected-value backend (default: {settings.backend})")
    parser.add_argument("--sample", type=int, default=None,
                        help="solve only N uniformly sampled classes (naive oracle runs)")
    parser.add_argument("--seed", type=int, default=None, help="seed for --sample")
    parser.add_argument("--output", "-o", default="-", help="CSV path, '-' for stdout")
    parser.add_argument("--distribution", default=None, help="also write the CE distribution CSV here")
    parser.add_argument("--xlsx", default=None, help="also write a workbook (sorted classes + distribution)")
    parser.set_defaults(handler=run)


def write_rows(results: SolvedTable, stream: TextIO) -> int:
    count = 0
    for row in results.to_rows():
        stream.write(row.to_csv_line() + "\n")
        count += 1
    return count


def run(args: argparse.Namespace, logger: RunLogger) -> int:
    backend = args.backend or settings.backend
    if args.sample is not None and backend != "naive":
        raise UsageError("--sample is only available with --backend naive")
    if args.sample is not None and args.sample <= 0:
        raise UsageError("--sample must be positive")
    if args.sample is not None and (args.distribution or args.xlsx):
        raise UsageError("--distribution / --xlsx need a complete solve")

    table = load_paytable_step(args, logger)
    results = solve_step(table, args, logger, backend=backend, sample=args.sample, seed=args.seed)

    with logger.step("write_csv", {"output": args.output}) as out:
        if args.output == "-":
            out["rows"] = write_rows(results, sys.stdout)
        else:
            path = Path(args.output)
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8", newline="\n") as f:
                out["rows"] = write_rows(results, f)

    if args.distribution:
        with logger.step("distribution", {"output": args.distribution}) as out:
            d = build_distribution(results)
            write_distribution_csv(d, args.distribution, compact=True)
            out["distinct_values"] = len(d)

    if args.xlsx:
        with logger.step("export_xlsx", {"output": args.xlsx}) as out:
            out["path"] = export_workbook(results, args.xlsx)
    return 0
