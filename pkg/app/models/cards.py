from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from app.core.errors import UsageError

DENOMINATION_CHARS = "23456789TJQKA"
SUIT_CHARS = "cdhs"


@dataclass(frozen=True, order=True)
class Card:
    """一张牌：点数 2–14（11–14 为 J–A），花色 0–3（c, d, h, s）。"""

    denomination: int
    suit: int

    def __post_init__(self) -> None:
        if not 2 <= self.denomination <= 14 or not 0 <= self.suit <= 3:
            raise UsageError(f"invalid card ({self.denomination}, {self.suit})")

    @property
    def index(self) -> int:
        # 0..51，按 (点数, 花色) 排序
        return (self.denomination - 2) * 4 + self.suit

    @staticmethod
    def from_index(index: int) -> "Card":
        return _card_from_index(int(index))

    @staticmethod
    def parse(token: str) -> "Card":
        text = token.strip()
        if len(text) != 2:
            raise UsageError(f"malformed card token {token!r}")
        denom = DENOMINATION_CHARS.find(text[0].upper())
        suit = SUIT_CHARS.find(text[1].lower())
        if denom < 0 or suit < 0:
            raise UsageError(f"malformed card token {token!r}")
        return Card(denom + 2, suit)

    def __str__(self) -> str:
        return DENOMINATION_CHARS[self.denomination - 2] + SUIT_CHARS[self.suit]


@lru_cache(maxsize=52)
def _card_from_index(index: int) -> Card:
    if not 0 <= index < 52:
        raise UsageError(f"card index out of range: {index}")
    return Card(index // 4 + 2, index % 4)


def full_deck() -> list[Card]:
    return [Card.from_index(i) for i in range(52)]


@dataclass(frozen=True)
class Hand:
    """5 张互不相同的牌；cards 始终按 (点数, 花色) 升序。"""

    cards: tuple[Card, ...]

    def __post_init__(self) -> None:
        cards = tuple(sorted(self.cards))
        if len(cards) != 5:
            raise UsageError(f"a hand needs exactly 5 cards, got {len(cards)}")
        if len(set(cards)) != 5:
            raise UsageError("duplicate card in hand: " + " ".join(str(c) for c in cards))
        object.__setattr__(self, "cards", cards)

    @classmethod
    def of(cls, cards: Iterable[Card]) -> "Hand":
        return cls(tuple(cards))

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "Hand":
        return cls(tuple(Card.from_index(i) for i in indices))

    def __iter__(self) -> Iterator[Card]:
        return iter(self.cards)

    def __len__(self) -> int:
        return 5

    def __getitem__(self, position: int) -> Card:
        return self.cards[position]

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(c.index for c in self.cards)

    @property
    def denominations(self) -> tuple[int, ...]:
        return tuple(c.denomination for c in self.cards)

    @property
    def suits(self) -> tuple[int, ...]:
        return tuple(c.suit for c in self.cards)

    def held(self, mask: int) -> tuple[Card, ...]:
        return tuple(c for i, c in enumerate(self.cards) if mask >> i & 1)

    def discarded(self, mask: int) -> tuple[Card, ...]:
        return tuple(c for i, c in enumerate(self.cards) if not mask >> i & 1)

    def mask_of(self, cards: Iterable[Card]) -> int:
        wanted = set(cards)
        return sum(1 << i for i, c in enumerate(self.cards) if c in wanted)

    def __str__(self) -> str:
        return " ".join(str(c) for c in self.cards)
