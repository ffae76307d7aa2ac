from __future__ import annotations

import argparse

from app.commands.common import add_paytable_argument, add_rank_table_argument, load_paytable_step, \
    load_rank_table_step, solve_step
from app.core.run_log import RunLogger
from app.schemas.strategy import CoverageRow
from app.services.strategy import double_listed, rank_table_coverage


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("coverage", help="CE numbers, CE range and probability per rank-table row")
    add_paytable_argument(parser)
    add_rank_table_argument(parser)
    parser.set_defaults(handler=run)


def render_coverage(rows: list[CoverageRow]) -> str:
    lines = [f"{'rank':>4} {'category':<34} {'probability':>11} {'cond. CE':>21}  CE nos."]
    for row in rows:
        span = f"{row.ce_min_decimal}-{row.ce_max_decimal}" if row.classes else "-"
        lines.append(f"{row.rank:>4} {row.label:<34} {row.probability_decimal:>11} {span:>21}  "
                     f"{row.ce_number_ranges or '-'}")
    return "\n".join(lines)


def run(args: argparse.Namespace, logger: RunLogger) -> int:
    table = load_paytable_step(args, logger)
    rank_table = load_rank_table_step(args, logger)
    results = solve_step(table, args, logger)
    with logger.step("coverage", {"table": rank_table.name}) as out:
        rows = rank_table_coverage(rank_table, results, workers=args.workers)
        shared = double_listed(rows)
        out.update(rows=len(rows), double_listed=shared)
    print(render_coverage(rows))
    print(f"CE numbers under two rows: {', '.join(str(n) for n in shared) or '-'}")
    return 0
