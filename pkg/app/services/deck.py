from __future__ import annotations

from collections import Counter
from functools import lru_cache
from itertools import chain, combinations
from math import comb
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.core.config import settings
from app.core.errors import ConfigError, UsageError
from app.models.cards import Card, Hand
from app.schemas.paytable import (
    GAME_CATEGORIES,
    REFINED_CATEGORIES,
    Category,
    Game,
    PayTable,
    resolve_category,
)

HANDS_TOTAL = comb(52, 5)

# 评估时分块，避免 (N, 5, 5) 中间数组过大
EVAL_CHUNK = 1 << 19


def categorize(hand: Hand, game: Game | str = Game.JACKS_OR_BETTER) -> Category:
    """按计数排序 + 同花标记判定牌型，A 可作 A2345 与 TJQKA 两端。"""
    return resolve_category(_refined_category(hand.denominations, hand.suits), Game(game))


def _refined_category(denoms: tuple[int, ...], suits: tuple[int, ...]) -> Category:
    counts = Counter(denoms)
    shape = sorted(counts.values(), reverse=True)
    ordered = sorted(denoms)
    flush = len(set(suits)) == 1
    straight = len(counts) == 5 and (ordered[4] - ordered[0] == 4 or ordered == [2, 3, 4, 5, 14])

    if straight and flush:
        return Category.ROYAL_FLUSH if ordered[0] == 10 else Category.STRAIGHT_FLUSH
    if shape[0] == 4:
        quad = next(d for d, n in counts.items() if n == 4)
        if quad == 14:
            return Category.FOUR_ACES
        return Category.FOUR_2_4 if quad <= 4 else Category.FOUR_5_K
    if shape == [3, 2]:
        return Category.FULL_HOUSE
    if flush:
        return Category.FLUSH
    if straight:
        return Category.STRAIGHT
    if shape[0] == 3:
        return Category.THREE_OF_A_KIND
    if shape == [2, 2, 1]:
        return Category.TWO_PAIRS
    if shape[0] == 2:
        pair = next(d for d, n in counts.items() if n == 2)
        return Category.JACKS_OR_BETTER if pair >= 11 else Category.OTHER
    return Category.OTHER


def payout(hand: Hand, table: PayTable) -> int:
    return table.payout_for(categorize(hand, table.game))


def refined_codes(cards: np.ndarray) -> np.ndarray:
    """批量判定：cards 为 (N, 5) 牌索引，返回 REFINED_CATEGORIES 下标 (int8)。"""
    cards = np.asarray(cards)
    if len(cards) > EVAL_CHUNK:
        return np.concatenate([refined_codes(cards[i:i + EVAL_CHUNK]) for i in range(0, len(cards), EVAL_CHUNK)])

    cards = np.sort(cards.astype(np.int16), axis=1)
    d = cards // 4 + 2
    s = cards % 4
    # 每张牌所在点数的张数；五张之和区分牌型：5 散牌 / 7 一对 / 9 两对 / 11 三条 / 13 葫芦 / 17 四条
    cnt = (d[:, :, None] == d[:, None, :]).sum(axis=2)
    sumc = cnt.sum(axis=1)
    flush = (s == s[:, :1]).all(axis=1)
    distinct = sumc == 5
    wheel = distinct & (d[:, 4] == 14) & (d[:, 3] == 5)
    straight = distinct & ((d[:, 4] - d[:, 0] == 4) | wheel)
    quad = np.where(cnt == 4, d, 0).max(axis=1)
    pair = np.where(cnt == 2, d, 0).max(axis=1)

    conditions = [
        straight & flush & (d[:, 0] == 10),
        straight & flush,
        quad == 14,
        (quad >= 2) & (quad <= 4),
        quad >= 5,
        sumc == 13,
        flush,
        straight,
        sumc == 11,
        sumc == 9,
        (sumc == 7) & (pair >= 11),
    ]
    return np.select(conditions, np.arange(len(conditions)), default=len(conditions)).astype(np.int8)


def payouts_array(cards: np.ndarray, table: PayTable) -> np.ndarray:
    lookup = np.asarray(table.refined_payouts(), dtype=np.int64)
    return lookup[refined_codes(cards)]


@lru_cache(maxsize=1)
def all_hands() -> np.ndarray:
    """全部 C(52,5) 手牌，每行升序，行按组合字典序。只读。"""
    flat = np.fromiter(chain.from_iterable(combinations(range(52), 5)), dtype=np.int8, count=5 * HANDS_TOTAL)
    hands = flat.reshape(HANDS_TOTAL, 5)
    hands.flags.writeable = False
    return hands


def category_frequencies(game: Game | str = Game.JACKS_OR_BETTER) -> dict[Category, int]:
    game = Game(game)
    codes = refined_codes(all_hands())
    refined = np.bincount(codes, minlength=len(REFINED_CATEGORIES))
    freq = {c: 0 for c in GAME_CATEGORIES[game]}
    for category, count in zip(REFINED_CATEGORIES, refined.tolist()):
        freq[resolve_category(category, game)] += count
    return freq


def parse_hand(text: str) -> Hand:
    tokens = text.replace(",", " ").split()
    if len(tokens) != 5:
        raise UsageError(f"expected 5 card tokens, got {len(tokens)}: {text!r}")
    return Hand.of(Card.parse(t) for t in tokens)


def format_hand(hand: Hand | tuple[Card, ...]) -> str:
    return " ".join(str(c) for c in hand)


def resolve_config_path(source: str | Path, directory: str | Path, kind: str) -> Path:
    """内置名（目录下 <name>.txt）或文件路径。"""
    path = Path(source)
    if path.is_file():
        return path
    candidate = Path(directory) / f"{source}.txt"
    if candidate.is_file():
        return candidate
    known = ", ".join(builtin_names(directory)) or "-"
    raise ConfigError(f"unknown {kind} {str(source)!r} (built-ins: {known})")


def builtin_names(directory: str | Path) -> list[str]:
    root = Path(directory)
    if not root.is_dir():
        return []
    return sorted(p.stem for p in root.glob("*.txt"))


def builtin_paytable_names() -> list[str]:
    return builtin_names(settings.paytable_dir)


def load_paytable(source: str | Path | None = None) -> PayTable:
    path = resolve_config_path(source or settings.default_paytable, settings.paytable_dir, "pay table")
    return parse_paytable(path.read_text(encoding="utf-8"), default_name=path.stem)


def parse_paytable(text: str, default_name: str = "custom") -> PayTable:
    """解析 `key = value` 格式的赔率表；未知键、重复键直接报错。"""

    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"pay table line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key in values:
            raise ConfigError(f"pay table line {lineno}: duplicate key {key!r}")
        values[key] = value

    name = values.pop("name", default_name)
    try:
        game = Game(values.pop("game", Game.JACKS_OR_BETTER.value))
    except ValueError as exc:
        raise ConfigError(f"pay table {name!r}: unknown game") from exc

    payouts: dict[Category, int] = {}
    for key, value in values.items():
        try:
            category = Category(key)
        except ValueError as exc:
            raise ConfigError(f"pay table {name!r}: unknown key {key!r}") from exc
        try:
            payouts[category] = int(value)
        except ValueError as exc:
            raise ConfigError(f"pay table {name!r}: payout for {key!r} is not an integer") from exc

    try:
        return PayTable(name=name, game=game, payouts=payouts)
    except ValidationError as exc:
        raise ConfigError(f"invalid pay table {name!r}", details=[e["msg"] for e in exc.errors()]) from exc
