from __future__ import annotations

import argparse

from app.commands.common import add_paytable_argument, add_rank_table_argument, load_paytable_step, \
    load_rank_table_step, solve_step
from app.core.run_log import RunLogger
from app.schemas.strategy import DerivedCategory
from app.services.strategy import derive_preliminary


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("derive", help="order hold categories by their smallest CE number")
    add_paytable_argument(parser)
    add_rank_table_argument(parser, default="table5")
    parser.set_defaults(handler=run)


def render_derived(derived: list[DerivedCategory]) -> str:
    lines = [f"{'#':>3} {'category':<34} {'CE nos.':>11} {'classes':>8}"]
    for pos, c in enumerate(derived, start=1):
        lines.append(f"{pos:>3} {c.label:<34} {f'{c.ce_min}-{c.ce_max}':>11} {c.classes:>8}")
    return "\n".join(lines)


def run(args: argparse.Namespace, logger: RunLogger) -> int:
    table = load_paytable_step(args, logger)
    categories = load_rank_table_step(args, logger)
    results = solve_step(table, args, logger)
    with logger.step("derive", {"categories": categories.name}) as out:
        derived = derive_preliminary(results, categories)
        out["order"] = [c.label for c in derived]
    print(render_derived(derived))
    return 0
