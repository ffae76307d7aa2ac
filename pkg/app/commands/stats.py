from __future__ import annotations

import argparse
import json

from app.commands.common import add_paytable_argument, load_paytable_step, solve_step
from app.core.run_log import RunLogger
from app.schemas.report import StatsReport
from app.services.deck import builtin_paytable_names
from app.services.distribution import build_distribution, class_count_checks, render_distribution_text, summarize


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("stats", help="distribution statistics of a pay table")
    add_paytable_argument(parser)
    parser.add_argument("--all", action="store_true", help="every built-in pay table")
    parser.add_argument("--json", action="store_true", help="print JSON instead of text")
    parser.add_argument("--distribution", type=int, default=0, metavar="N",
                        help="also print the first N distribution rows")
    parser.add_argument("--check-counts", action="store_true",
                        help="verify the combinatorial class counts (9/6 Jacks or Better)")
    parser.set_defaults(handler=run)


def render_stats(report: StatsReport) -> str:
    return "\n".join([
        f"pay table:            {report.paytable} ({report.game})",
        f"expected return:      {report.expected_return} = {report.expected_return_decimal}"
        f" ({report.expected_return_percent}%)",
        f"column sum:           {report.er_numerator}",
        f"distinct CE values:   {report.distinct_values}",
        f"  with a hold:        {report.with_hold_values}",
        f"  discard all:        {report.garbage_values}",
        f"median CE:            {report.median} = {report.median_decimal}"
        f" (CE no. {report.median_ce_number}, next {report.median_next_decimal})",
        f"garbage probability:  {report.garbage_probability} = {report.garbage_probability_decimal}"
        f" ({report.garbage_hands} hands)",
        f"non-unique classes:   {report.non_unique_classes}",
    ])


def run(args: argparse.Namespace, logger: RunLogger) -> int:
    sources = builtin_paytable_names() if args.all else [args.paytable]
    reports = []
    for source in sources:
        args.paytable = source
        table = load_paytable_step(args, logger)
        results = solve_step(table, args, logger)
        with logger.step("distribution", {"paytable": table.name}) as out:
            report = summarize(results, table)
            out.update(report.model_dump())
        reports.append(report)

        if args.check_counts:
            with logger.step("class_counts", {"paytable": table.name}) as out:
                counts = class_count_checks(results)
                out.update(counts.model_dump())
        if not args.json:
            print(render_stats(report))
            if args.check_counts:
                for item in counts.items:
                    print(f"CE no. {item.ce_number} [{item.description}]: "
                          f"{item.actual_classes} classes (expected {item.expected_classes})")
            if args.distribution:
                print(render_distribution_text(build_distribution(results), limit=args.distribution))
            print()

    if args.json:
        print(json.dumps([r.model_dump() for r in reports], ensure_ascii=False, indent=2))
    return 0
