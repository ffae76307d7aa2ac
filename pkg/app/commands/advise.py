from __future__ import annotations

import argparse

from app.commands.common import (
    add_paytable_argument,
    add_rank_table_argument,
    load_memo_step,
    load_paytable_step,
    load_rank_table_step,
)
from app.core.config import settings
from app.core.run_log import RunLogger
from app.models.cards import Hand
from app.services.deck import format_hand, parse_hand
from app.services.distribution import scaled_to_decimal
from app.services.expect import BACKENDS, ce_vector, select_best
from app.services.strategy import classify_row


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("advise", help="exact CE of all 32 holds for one hand")
    parser.add_argument("hand", nargs="+", help='five cards, e.g. "8c Tc Jc Qc Kc"')
    add_paytable_argument(parser)
    add_rank_table_argument(parser)
    parser.add_argument("--backend", choices=BACKENDS, default=None)
    parser.set_defaults(handler=run)


def render_advice(hand: Hand, ce: list[int], best: int, unique: bool, row_text: str | None = None) -> str:
    lines = [f"hand: {hand}", f"{'hold':<16} {'mask':>5} {'scaled CE':>11} {'CE':>11}"]
    order = sorted(range(32), key=lambda m: (-ce[m], -m))
    for mask in order:
        held = format_hand(hand.held(mask)) or "-"
        marker = "  <- best" if mask == best else ""
        lines.append(f"{held:<16} {mask:>5} {ce[mask]:>11} {scaled_to_decimal(ce[mask]):>11}{marker}")
    lines.append(f"best: {format_hand(hand.held(best)) or '(discard all)'}"
                 f"{'' if unique else ' (tied)'}")
    if row_text:
        lines.append(row_text)
    return "\n".join(lines)


def run(args: argparse.Namespace, logger: RunLogger) -> int:
    hand = parse_hand(" ".join(args.hand))
    backend = args.backend or settings.backend
    table = load_paytable_step(args, logger)
    memo = load_memo_step(table, logger) if backend == "fast" else None

    with logger.step("advise", {"hand": str(hand), "backend": backend}) as out:
        ce = ce_vector(hand, table, backend, memo)
        best, unique = select_best(ce)
        best_mask, is_unique = int(best[0]), bool(unique[0])
        out.update(best_mask=best_mask, best_ce=int(ce[best_mask]), unique=is_unique)

    rank_table = load_rank_table_step(args, logger)
    with logger.step("classify", {"hand": str(hand), "table": rank_table.name}) as out:
        mask, row = classify_row(hand, rank_table)
        out.update(rank=row.rank, label=row.label, mask=mask)
    row_text = f"{rank_table.name} rank {row.rank} ({row.label}): hold {format_hand(hand.held(mask)) or '-'}"
    if int(ce[mask]) != int(ce[best_mask]):
        row_text += f" [differs from optimum: {scaled_to_decimal(int(ce[mask]))}]"

    print(render_advice(hand, ce.tolist(), best_mask, is_unique, row_text))
    return 0
