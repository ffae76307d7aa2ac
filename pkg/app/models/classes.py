from __future__ import annotations

from dataclasses import dataclass

from app.models.cards import Hand

SHAPES = ("distinct", "one_pair", "two_pairs", "trips", "full_house", "quads")


@dataclass(frozen=True)
class CanonicalHand:
    """规范代表手牌：花色按首次出现编号（0 起），pattern 为 1 起的标签序列。"""

    representative: Hand
    pattern: tuple[int, ...]

    @property
    def denominations(self) -> tuple[int, ...]:
        return self.representative.denominations


@dataclass(frozen=True)
class EquivClass:
    canonical: CanonicalHand
    orbit_size: int
    class_index: int
    shape: str

    @property
    def hand(self) -> Hand:
        return self.canonical.representative
