"""花色同构规范化与 134,459 个等价类的枚举。

规范形式：在 24 种花色置换下，取“按 (点数, 花色) 排序后的牌索引元组”的字典序最小者。
这样得到的花色标签天然满足首次出现编号（n1 = 1，ni <= max(n1..ni-1) + 1）。
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterable, Iterator

import numpy as np

from app.models.cards import Card, Hand
from app.models.classes import SHAPES, CanonicalHand, EquivClass

SUIT_PERMUTATIONS: tuple[tuple[int, ...], ...] = tuple(permutations(range(4)))
DENOMINATIONS = tuple(range(2, 15))

# 点数计数形状 -> 牌型组
_SHAPE_BY_COUNTS = {
    (1, 1, 1, 1, 1): "distinct",
    (2, 1, 1, 1): "one_pair",
    (2, 2, 1): "two_pairs",
    (3, 1, 1): "trips",
    (3, 2): "full_house",
    (4, 1): "quads",
}


def canonical_key(cards: Iterable[Card]) -> tuple[int, ...]:
    """任意 0–5 张牌的规范编码：字典序最小的升序牌索引元组。"""
    cards = tuple(cards)
    return min(
        tuple(sorted((c.denomination - 2) * 4 + perm[c.suit] for c in cards))
        for perm in SUIT_PERMUTATIONS
    )


def canonicalize(hand: Hand) -> CanonicalHand:
    key = canonical_key(hand)
    return CanonicalHand(
        representative=Hand.from_indices(key),
        pattern=tuple(i % 4 + 1 for i in key),
    )


def orbit_size(c: CanonicalHand | Hand) -> int:
    """24 种花色置换下得到的不同手牌数（4 / 12 / 24）。"""
    hand = c.representative if isinstance(c, CanonicalHand) else c
    return len({
        frozenset((card.denomination, perm[card.suit]) for card in hand)
        for perm in SUIT_PERMUTATIONS
    })


def shape_of(hand: Hand | Iterable[int]) -> str:
    denoms = hand.denominations if isinstance(hand, Hand) else tuple(hand)
    return _SHAPE_BY_COUNTS[tuple(sorted(Counter(denoms).values(), reverse=True))]


def first_use_sequences(length: int = 5, labels: int = 4) -> list[tuple[int, ...]]:
    """直接生成首次出现编号序列：n1 = 1，ni <= max + 1，标签不超过 labels。"""
    out: list[tuple[int, ...]] = []

    def _helper_extend(prefix: tuple[int, ...], top: int) -> None:
        if len(prefix) == length:
            out.append(prefix)
            return
        for label in range(1, min(top + 1, labels) + 1):
            _helper_extend(prefix + (label,), max(top, label))

    _helper_extend((1,), 1)
    return out


def _denomination_tuples(shape: str) -> Iterator[tuple[int, ...]]:
    """按牌型组的循环顺序给出升序点数元组：先成组点数，再踢脚。"""
    if shape == "distinct":
        yield from combinations(DENOMINATIONS, 5)
    elif shape == "one_pair":
        for x in DENOMINATIONS:
            for kickers in combinations([r for r in DENOMINATIONS if r != x], 3):
                yield tuple(sorted((x, x) + kickers))
    elif shape == "two_pairs":
        for x, y in combinations(DENOMINATIONS, 2):
            for z in DENOMINATIONS:
                if z not in (x, y):
                    yield tuple(sorted((x, x, y, y, z)))
    elif shape == "trips":
        for x in DENOMINATIONS:
            for kickers in combinations([r for r in DENOMINATIONS if r != x], 2):
                yield tuple(sorted((x, x, x) + kickers))
    elif shape == "full_house":
        for x in DENOMINATIONS:
            for y in DENOMINATIONS:
                if y != x:
                    yield tuple(sorted((x, x, x, y, y)))
    elif shape == "quads":
        for x in DENOMINATIONS:
            for y in DENOMINATIONS:
                if y != x:
                    yield tuple(sorted((x, x, x, x, y)))
    else:
        raise ValueError(f"unknown shape {shape!r}")


def _signature(denoms: tuple[int, ...]) -> tuple[int, ...]:
    groups: dict[int, int] = {}
    return tuple(groups.setdefault(d, len(groups)) for d in denoms)


@lru_cache(maxsize=None)
def _label_patterns(signature: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], int], ...]:
    """同一相等结构的点数元组共享花色标签模式；返回 (标签序列, 轨道大小)，标签 0 起，按字典序。"""
    template = tuple(2 + g for g in signature)
    found: dict[tuple[int, ...], int] = {}
    for suits in product(range(4), repeat=5):
        cards = tuple(Card(d, s) for d, s in zip(template, suits))
        if len(set(cards)) < 5:
            continue
        key = canonical_key(cards)
        if key not in found:
            found[key] = orbit_size(Hand.from_indices(key))
    return tuple(sorted((tuple(i % 4 for i in key), orbit) for key, orbit in found.items()))


def patterns_per_shape() -> dict[str, int]:
    return {
        shape: len(_label_patterns(_signature(next(_denomination_tuples(shape)))))
        for shape in SHAPES
    }


@dataclass(frozen=True)
class ClassTable:
    """枚举结果的紧凑形式，供批量求解。"""

    cards: np.ndarray  # (N, 5) int8，代表手牌的升序牌索引
    orbit: np.ndarray  # (N,) int32
    shape: np.ndarray  # (N,) int8，SHAPES 下标

    def __len__(self) -> int:
        return len(self.orbit)

    def hand(self, position: int) -> Hand:
        return Hand.from_indices(self.cards[position].tolist())


@lru_cache(maxsize=1)
def class_table() -> ClassTable:
    rows: list[tuple[int, ...]] = []
    orbits: list[int] = []
    shapes: list[int] = []
    for shape_id, shape in enumerate(SHAPES):
        for denoms in _denomination_tuples(shape):
            for labels, orbit in _label_patterns(_signature(denoms)):
                rows.append(tuple((d - 2) * 4 + s for d, s in zip(denoms, labels)))
                orbits.append(orbit)
                shapes.append(shape_id)
    table = ClassTable(
        cards=np.asarray(rows, dtype=np.int8),
        orbit=np.asarray(orbits, dtype=np.int32),
        shape=np.asarray(shapes, dtype=np.int8),
    )
    for arr in (table.cards, table.orbit, table.shape):
        arr.flags.writeable = False
    return table


@lru_cache(maxsize=1)
def enumerate_classes() -> tuple[EquivClass, ...]:
    """全部等价类，class_index 从 1 开始，顺序：牌型组 -> 点数元组 -> 标签模式。"""
    table = class_table()
    out = []
    for i, (row, orbit, shape) in enumerate(zip(table.cards.tolist(), table.orbit.tolist(), table.shape.tolist())):
        rep = Hand.from_indices(row)
        out.append(EquivClass(
            canonical=CanonicalHand(representative=rep, pattern=tuple(c % 4 + 1 for c in row)),
            orbit_size=orbit,
            class_index=i + 1,
            shape=SHAPES[shape],
        ))
    return tuple(out)


@lru_cache(maxsize=1)
def _position_by_key() -> dict[tuple[int, ...], int]:
    return {tuple(row): i for i, row in enumerate(class_table().cards.tolist())}


def class_position(hand: Hand) -> int:
    """手牌所属等价类在枚举中的 0 起位置。"""
    return _position_by_key()[canonical_key(hand)]


def class_of(hand: Hand) -> EquivClass:
    return enumerate_classes()[class_position(hand)]


def canonical_codes(cards: np.ndarray) -> np.ndarray:
    """批量规范化：返回规范牌索引元组的 52 进制整数编码（保持字典序）。"""
    cards = np.asarray(cards, dtype=np.int64)
    denom_part = (cards // 4) * 4
    suit = cards % 4
    weights = 52 ** np.arange(4, -1, -1, dtype=np.int64)
    best = None
    for perm in SUIT_PERMUTATIONS:
        mapped = np.sort(denom_part + np.asarray(perm, dtype=np.int64)[suit], axis=1)
        code = mapped @ weights
        best = code if best is None else np.minimum(best, code)
    return best
