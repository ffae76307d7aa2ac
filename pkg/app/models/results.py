from __future__ import annotations

from dataclasses import dataclass

from app.models.classes import EquivClass


@dataclass(frozen=True)
class HoldResult:
    """一个等价类的 32 种保留方式的缩放期望值与最优保留。"""

    equiv_class: EquivClass
    ce: tuple[int, ...]
    best_mask: int
    unique: bool

    @property
    def best_ce(self) -> int:
        return self.ce[self.best_mask]

    @property
    def hold_flags(self) -> tuple[int, ...]:
        return tuple(self.best_mask >> i & 1 for i in range(5))


@dataclass(frozen=True)
class DistributionEntry:
    """一个不同的最优缩放期望值及其等价类统计。"""

    ce_number: int
    scaled_value: int
    classes_total: int
    classes_by_size: tuple[int, int, int]
    hand_weight: int
    cumulative_classes: int
    cumulative_weight: int
    held_classes: int
    garbage_classes: int


@dataclass(frozen=True)
class CEDistribution:
    entries: tuple[DistributionEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, position: int) -> DistributionEntry:
        return self.entries[position]

    def entry(self, ce_number: int) -> DistributionEntry:
        return self.entries[ce_number - 1]

    @property
    def total_weight(self) -> int:
        return sum(e.hand_weight for e in self.entries)

    @property
    def total_classes(self) -> int:
        return sum(e.classes_total for e in self.entries)
