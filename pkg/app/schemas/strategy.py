from __future__ import annotations

from pydantic import BaseModel, Field


class Violation(BaseModel):
    class_index: int
    hand: str
    rank: int = Field(..., description="命中的排名表行号")
    row_label: str
    classified_mask: int
    classified_hold: str
    classified_ce: int
    best_mask: int
    best_hold: str
    best_ce: int


class VerificationReport(BaseModel):
    table: str
    paytable: str
    classes_checked: int
    violations: list[Violation] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def violations_at(self, scaled_ce: int) -> list[Violation]:
        return [v for v in self.violations if v.best_ce == scaled_ce]


class DerivedCategory(BaseModel):
    label: str
    table_rank: int = Field(..., description="在分类用排名表中的行号")
    ce_min: int = Field(..., description="最小期望值名次")
    ce_max: int
    classes: int


class CoverageRow(BaseModel):
    rank: int
    label: str
    classes: int
    hand_weight: int
    probability: str
    probability_decimal: str
    ce_numbers: list[int]
    ce_number_ranges: str
    ce_min_decimal: str | None = None
    ce_max_decimal: str | None = None
