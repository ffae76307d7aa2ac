from __future__ import annotations

from pydantic import BaseModel, Field


class ClassCountItem(BaseModel):
    ce_number: int = Field(..., description="期望值名次（降序，1 起）")
    description: str = Field(..., description="该名次对应的保留类别")
    expected_classes: int
    actual_classes: int
    expected_weight: int | None = None
    actual_weight: int | None = None

    @property
    def ok(self) -> bool:
        if self.expected_classes != self.actual_classes:
            return False
        return self.expected_weight is None or self.expected_weight == self.actual_weight


class ClassCountReport(BaseModel):
    items: list[ClassCountItem]

    @property
    def passed(self) -> bool:
        return all(item.ok for item in self.items)


class StatsReport(BaseModel):
    paytable: str
    game: str
    distinct_values: int = Field(..., description="不同的最优条件期望个数")
    with_hold_values: int = Field(..., description="至少保留一张的不同值个数")
    garbage_values: int = Field(..., description="全换（垃圾手牌）的不同值个数")
    er_numerator: int = Field(..., description="Σ 权重 × 缩放期望（约分前）")
    expected_return: str = Field(..., description="总期望回报，最简分数")
    expected_return_decimal: str
    expected_return_percent: str = Field(..., description="百分比，4 位小数")
    median: str
    median_decimal: str
    median_ce_number: int
    median_next_decimal: str | None = Field(default=None, description="中位数下一个相邻值")
    garbage_probability: str
    garbage_probability_decimal: str
    garbage_hands: int
    non_unique_classes: int
