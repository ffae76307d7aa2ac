from __future__ import annotations

import argparse

from app.core.config import settings
from app.core.run_log import RunLogger
from app.schemas.paytable import PayTable
from app.services.deck import load_paytable
from app.services.expect import CompletionMemo, SolvedTable, load_or_build_memo, solve_all
from app.services.strategy import RankTable, load_rank_table


def add_paytable_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--paytable", "-p",
        default=None,
        help=f"built-in pay table name or file path (default: {settings.default_paytable})",
    )


def add_rank_table_argument(parser: argparse.ArgumentParser, default: str | None = None) -> None:
    parser.add_argument(
        "--table", "-t",
        default=default,
        help=f"built-in rank table name or file path (default: {default or settings.default_rank_table})",
    )


def load_paytable_step(args: argparse.Namespace, logger: RunLogger) -> PayTable:
    with logger.step("load_paytable", {"source": args.paytable}) as out:
        table = load_paytable(args.paytable)
        out.update(name=table.name, game=table.game.value, fingerprint=table.fingerprint)
    return table


def load_rank_table_step(args: argparse.Namespace, logger: RunLogger) -> RankTable:
    with logger.step("load_rank_table", {"source": args.table}) as out:
        table = load_rank_table(args.table)
        out.update(name=table.name, rows=len(table))
    return table


def load_memo_step(table: PayTable, logger: RunLogger) -> CompletionMemo:
    with logger.step("build_memo", {"fingerprint": table.fingerprint,
                                    "cache_dir": settings.memo_cache_path}) as out:
        memo = load_or_build_memo(table)
        out["payout_sum"] = memo.total(())
    return memo


def solve_step(
        table: PayTable,
        args: argparse.Namespace,
        logger: RunLogger,
        backend: str = "fast",
        sample: int | None = None,
        seed: int | None = None,
) -> SolvedTable:
    """整表求解；fast 后端先加载（或构建）完成表。"""
    memo = load_memo_step(table, logger) if backend == "fast" else None
    step_input = {"paytable": table.name, "backend": backend, "workers": args.workers,
                  "sample": sample, "seed": seed}
    with logger.step("solve", step_input) as out:
        results = solve_all(table, backend, memo=memo, workers=args.workers, sample=sample, seed=seed)
        out.update(classes=len(results), non_unique=int((~results.unique).sum()))
    return results
