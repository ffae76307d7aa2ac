from __future__ import annotations

import argparse
from collections import Counter

from app.commands.common import add_paytable_argument, add_rank_table_argument, load_paytable_step, \
    load_rank_table_step, solve_step
from app.core.errors import VerificationError
from app.core.run_log import RunLogger
from app.schemas.strategy import VerificationReport
from app.services.distribution import scaled_to_decimal
from app.services.strategy import verify_table


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("verify", help="check a rank table against the exact optimum")
    add_paytable_argument(parser)
    add_rank_table_argument(parser)
    parser.add_argument("--limit", type=int, default=50, help="violations to print (0 = all)")
    parser.set_defaults(handler=run)


def render_report(report: VerificationReport, limit: int = 50) -> str:
    lines = [f"rank table {report.table} vs {report.paytable}: "
             f"{report.classes_checked} classes, {len(report.violations)} violations"]
    if report.passed:
        return lines[0]
    by_value = Counter(v.best_ce for v in report.violations)
    for value, count in sorted(by_value.items(), reverse=True):
        lines.append(f"  best CE {value} ({scaled_to_decimal(value)}): {count} classes")
    shown = report.violations if limit <= 0 else report.violations[:limit]
    for v in shown:
        lines.append(
            f"  #{v.class_index} {v.hand}: rank {v.rank} [{v.row_label}] holds {v.classified_hold} "
            f"= {v.classified_ce}, best {v.best_hold} = {v.best_ce}"
        )
    if len(shown) < len(report.violations):
        lines.append(f"  ... {len(report.violations) - len(shown)} more")
    return "\n".join(lines)


def run(args: argparse.Namespace, logger: RunLogger) -> int:
    table = load_paytable_step(args, logger)
    rank_table = load_rank_table_step(args, logger)
    results = solve_step(table, args, logger)
    with logger.step("verify", {"table": rank_table.name, "paytable": table.name}) as out:
        report = verify_table(rank_table, results, workers=args.workers)
        out.update(classes_checked=report.classes_checked, violations=len(report.violations))
    print(render_report(report, args.limit))
    return 0 if report.passed else VerificationError.exit_code
