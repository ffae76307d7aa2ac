from __future__ import annotations

import hashlib
from enum import Enum

from pydantic import BaseModel, Field, model_validator


class Game(str, Enum):
    JACKS_OR_BETTER = "jacks_or_better"
    DOUBLE_BONUS = "double_bonus"


class Category(str, Enum):
    ROYAL_FLUSH = "royal_flush"
    STRAIGHT_FLUSH = "straight_flush"
    FOUR_OF_A_KIND = "four_of_a_kind"
    FOUR_ACES = "four_aces"
    FOUR_2_4 = "four_2_4"
    FOUR_5_K = "four_5_k"
    FULL_HOUSE = "full_house"
    FLUSH = "flush"
    STRAIGHT = "straight"
    THREE_OF_A_KIND = "three_of_a_kind"
    TWO_PAIRS = "two_pairs"
    JACKS_OR_BETTER = "jacks_or_better"
    OTHER = "other"


# 细分类别：评估器内部统一输出这 12 类，再按玩法合并
REFINED_CATEGORIES: tuple[Category, ...] = (
    Category.ROYAL_FLUSH,
    Category.STRAIGHT_FLUSH,
    Category.FOUR_ACES,
    Category.FOUR_2_4,
    Category.FOUR_5_K,
    Category.FULL_HOUSE,
    Category.FLUSH,
    Category.STRAIGHT,
    Category.THREE_OF_A_KIND,
    Category.TWO_PAIRS,
    Category.JACKS_OR_BETTER,
    Category.OTHER,
)

QUAD_CATEGORIES = frozenset({Category.FOUR_ACES, Category.FOUR_2_4, Category.FOUR_5_K})

GAME_CATEGORIES: dict[Game, tuple[Category, ...]] = {
    Game.JACKS_OR_BETTER: (
        Category.ROYAL_FLUSH,
        Category.STRAIGHT_FLUSH,
        Category.FOUR_OF_A_KIND,
        Category.FULL_HOUSE,
        Category.FLUSH,
        Category.STRAIGHT,
        Category.THREE_OF_A_KIND,
        Category.TWO_PAIRS,
        Category.JACKS_OR_BETTER,
        Category.OTHER,
    ),
    Game.DOUBLE_BONUS: REFINED_CATEGORIES,
}


def resolve_category(refined: Category, game: Game) -> Category:
    if game is Game.JACKS_OR_BETTER and refined in QUAD_CATEGORIES:
        return Category.FOUR_OF_A_KIND
    return refined


class PayTable(BaseModel):
    """赔率表：每个类别一行，按“1 赔 x”计。"""

    name: str = Field(..., min_length=1, description="赔率表名称")
    game: Game = Field(default=Game.JACKS_OR_BETTER, description="玩法，决定类别集合")
    payouts: dict[Category, int] = Field(..., description="类别 -> 赔付")

    @model_validator(mode="after")
    def _check_categories(self) -> "PayTable":
        expected = GAME_CATEGORIES[self.game]
        missing = [c.value for c in expected if c not in self.payouts]
        extra = [c.value for c in self.payouts if c not in expected]
        if missing or extra:
            raise ValueError(f"pay table {self.name!r}: missing={missing} unexpected={extra}")
        negative = [c.value for c, v in self.payouts.items() if v < 0]
        if negative:
            raise ValueError(f"pay table {self.name!r}: negative payouts for {negative}")
        if self.payouts[Category.OTHER] != 0:
            raise ValueError(f"pay table {self.name!r}: 'other' must pay 0")
        return self

    @property
    def categories(self) -> tuple[Category, ...]:
        return GAME_CATEGORIES[self.game]

    @property
    def max_payout(self) -> int:
        return max(self.payouts.values())

    def payout_for(self, category: Category) -> int:
        return self.payouts[resolve_category(category, self.game)]

    def refined_payouts(self) -> list[int]:
        """按 REFINED_CATEGORIES 顺序展开的赔付向量。"""
        return [self.payout_for(c) for c in REFINED_CATEGORIES]

    @property
    def fingerprint(self) -> str:
        body = self.game.value + ":" + ",".join(f"{c.value}={self.payouts[c]}" for c in self.categories)
        return hashlib.sha256(body.encode("utf-8")).hexdigest()[:16]

    def to_text(self) -> str:
        lines = [f"name = {self.name}", f"game = {self.game.value}"]
        lines += [f"{c.value} = {self.payouts[c]}" for c in self.categories]
        return "\n".join(lines) + "\n"
