from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, ValidationError, field_validator

from app.core.errors import UsageError


class SolveRow(BaseModel):
    """求解输出的一行（19 列）：序号, 轨道, 5 点数, 5 花色标签, 5 保留标记, 缩放期望, u/n。"""

    class_index: int = Field(..., ge=1)
    orbit_size: Literal[4, 12, 24]
    denominations: list[int] = Field(..., min_length=5, max_length=5)
    suit_labels: list[int] = Field(..., min_length=5, max_length=5)
    hold_flags: list[int] = Field(..., min_length=5, max_length=5)
    scaled_ce: int = Field(..., ge=0)
    uniqueness: Literal["u", "n"]

    @field_validator("denominations")
    @classmethod
    def _check_denominations(cls, value: list[int]) -> list[int]:
        if any(not 2 <= d <= 14 for d in value):
            raise ValueError("denominations must lie in 2..14")
        return value

    @field_validator("suit_labels")
    @classmethod
    def _check_labels(cls, value: list[int]) -> list[int]:
        if any(not 1 <= s <= 4 for s in value):
            raise ValueError("suit labels must lie in 1..4")
        return value

    @field_validator("hold_flags")
    @classmethod
    def _check_flags(cls, value: list[int]) -> list[int]:
        if any(f not in (0, 1) for f in value):
            raise ValueError("hold flags must be 0 or 1")
        return value

    @property
    def hold_mask(self) -> int:
        return sum(f << i for i, f in enumerate(self.hold_flags))

    def to_csv_line(self) -> str:
        fields = [self.class_index, self.orbit_size, *self.denominations, *self.suit_labels,
                  *self.hold_flags, self.scaled_ce, self.uniqueness]
        return ",".join(str(f) for f in fields)

    @classmethod
    def from_csv_line(cls, line: str) -> "SolveRow":
        parts = line.strip().split(",")
        if len(parts) != 19:
            raise UsageError(f"expected 19 CSV fields, got {len(parts)}")
        try:
            nums = [int(p) for p in parts[:18]]
        except ValueError as exc:
            raise UsageError(f"non-integer CSV field in {line.strip()!r}") from exc
        try:
            return cls(
                class_index=nums[0],
                orbit_size=nums[1],
                denominations=nums[2:7],
                suit_labels=nums[7:12],
                hold_flags=nums[12:17],
                scaled_ce=nums[17],
                uniqueness=parts[18],
            )
        except ValidationError as exc:
            raise UsageError(f"invalid CSV row {line.strip()!r}", details=[e["msg"] for e in exc.errors()]) from exc
