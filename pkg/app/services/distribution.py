from __future__ import annotations

import csv
from decimal import Decimal
from fractions import Fraction
from math import floor
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from app.core.errors import ContractError, VerificationError
from app.models.results import CEDistribution, DistributionEntry, HoldResult
from app.schemas.paytable import PayTable
from app.schemas.report import ClassCountItem, ClassCountReport, StatsReport
from app.schemas.solve import SolveRow
from app.services.deck import HANDS_TOTAL
from app.services.expect import SCALE, SolvedTable

DISTRIBUTION_HEADER = ["no", "classes", "c4", "c12", "c24", "weight", "scaled", "decimal"]

# 组合推导的等价类个数（9/6 全赔率下的两个名次）
# 80：4-F、h = 2 的六类手牌
CE80_CLASSES = (6 * 56 * 3 - 6) + (6 * 28 - 1) + (4 * 28 * 3 - 2) + 3 * 8 * 2 + 3 * 8 + (6 * 28 * 2 - 2)
# 83：(2–8,T)TJQK，去掉可作 4-RF / 5-F / 4-SF / 3-RF / 4-F 的模式
CE83_CLASSES = 7 * (51 - 14) + (20 - 8)


def fraction_to_decimal(value: Fraction, places: int = 6) -> Decimal:
    """精确的四舍五入（half-up），非负输入。"""
    n = floor(value * 10 ** places + Fraction(1, 2))
    return Decimal(n).scaleb(-places)


def scaled_to_decimal(scaled: int, places: int = 6) -> Decimal:
    return fraction_to_decimal(Fraction(int(scaled), SCALE), places)


def _columns(results: SolvedTable | Sequence[HoldResult]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(最优缩放期望, 轨道大小, 最优掩码)。"""
    if isinstance(results, SolvedTable):
        return results.best_ce, results.orbit, results.best
    values = np.fromiter((r.best_ce for r in results), dtype=np.int64)
    orbit = np.fromiter((r.equiv_class.orbit_size for r in results), dtype=np.int64)
    best = np.fromiter((r.best_mask for r in results), dtype=np.int64)
    return values, orbit, best


def build_distribution(results: SolvedTable | Sequence[HoldResult]) -> CEDistribution:
    values, orbit, best = _columns(results)
    if len(values) == 0:
        return CEDistribution(entries=())
    uniq, inverse = np.unique(values, return_inverse=True)
    inverse = inverse.reshape(-1)
    n = len(uniq)

    def _helper_count(selector: np.ndarray) -> list[int]:
        return np.bincount(inverse[selector], minlength=n).tolist()

    by4, by12, by24 = (_helper_count(orbit == size) for size in (4, 12, 24))
    held = _helper_count(best != 0)
    garbage = _helper_count(best == 0)
    uniq_list = uniq.tolist()

    entries = []
    cum_classes = cum_weight = 0
    for rank, j in enumerate(range(n - 1, -1, -1), start=1):
        sizes = (by4[j], by12[j], by24[j])
        weight = 4 * sizes[0] + 12 * sizes[1] + 24 * sizes[2]
        cum_classes += sum(sizes)
        cum_weight += weight
        entries.append(DistributionEntry(
            ce_number=rank,
            scaled_value=int(uniq_list[j]),
            classes_total=sum(sizes),
            classes_by_size=sizes,
            hand_weight=weight,
            cumulative_classes=cum_classes,
            cumulative_weight=cum_weight,
            held_classes=held[j],
            garbage_classes=garbage[j],
        ))
    return CEDistribution(entries=tuple(entries))


def er_numerator(d: CEDistribution) -> int:
    return sum(e.hand_weight * e.scaled_value for e in d.entries)


def expected_return(d: CEDistribution) -> Fraction:
    """条件期望的期望即无条件期望：Σ(权重 × 缩放值) / (总权重 × SCALE)。"""
    if not d.entries:
        raise ContractError("empty distribution")
    return Fraction(er_numerator(d), d.total_weight * SCALE)


def median_bracket(d: CEDistribution) -> tuple[DistributionEntry, DistributionEntry | None]:
    """降序累计权重首次 >= 总权重一半的条目，以及它之后的相邻条目。"""
    if not d.entries:
        raise ContractError("empty distribution")
    half = Fraction(d.total_weight, 2)
    for i, entry in enumerate(d.entries):
        if entry.cumulative_weight >= half:
            following = d.entries[i + 1] if i + 1 < len(d.entries) else None
            return entry, following
    raise ContractError("cumulative weight never reaches half of the total")


def median_ce(d: CEDistribution) -> Fraction:
    entry, _ = median_bracket(d)
    return Fraction(entry.scaled_value, SCALE)


def garbage_hands(results: SolvedTable | Sequence[HoldResult]) -> int:
    _, orbit, best = _columns(results)
    return int(orbit[best == 0].sum())


def garbage_probability(results: SolvedTable | Sequence[HoldResult]) -> Fraction:
    _, orbit, _ = _columns(results)
    return Fraction(garbage_hands(results), int(orbit.sum()))


def with_hold_values(d: CEDistribution) -> int:
    return sum(1 for e in d.entries if e.held_classes)


def garbage_values(d: CEDistribution) -> int:
    return sum(1 for e in d.entries if e.garbage_classes)


def ce_numbers(results: SolvedTable, d: CEDistribution) -> np.ndarray:
    """每个结果的期望值名次（1 起，降序）。"""
    ascending = np.asarray([e.scaled_value for e in reversed(d.entries)], dtype=np.int64)
    return len(ascending) - np.searchsorted(ascending, results.best_ce)


def class_count_checks(results: SolvedTable | Sequence[HoldResult]) -> ClassCountReport:
    """9/6 全赔率下的组合计数核对；不符时抛 VerificationError。"""

    d = build_distribution(results)
    expectations = [
        (32, "2-HP", 17_562, 337_464),
        (80, "4-F: h=2", CE80_CLASSES, None),
        (83, "4-S: (2-8,T)TJQK", CE83_CLASSES, None),
    ]
    items = []
    for ce_number, description, classes, weight in expectations:
        entry = d.entry(ce_number) if ce_number <= len(d) else None
        items.append(ClassCountItem(
            ce_number=ce_number,
            description=description,
            expected_classes=classes,
            actual_classes=entry.classes_total if entry else 0,
            expected_weight=weight,
            actual_weight=entry.hand_weight if entry and weight is not None else None,
        ))
    report = ClassCountReport(items=items)
    if not report.passed:
        bad = [item.ce_number for item in items if not item.ok]
        raise VerificationError(f"class counts differ at CE numbers {bad}", details=report.model_dump())
    return report


def summarize(results: SolvedTable, table: PayTable) -> StatsReport:
    d = build_distribution(results)
    er = expected_return(d)
    median_entry, following = median_bracket(d)
    median = Fraction(median_entry.scaled_value, SCALE)
    garbage = garbage_probability(results)
    return StatsReport(
        paytable=table.name,
        game=table.game.value,
        distinct_values=len(d),
        with_hold_values=with_hold_values(d),
        garbage_values=garbage_values(d),
        er_numerator=er_numerator(d),
        expected_return=f"{er.numerator}/{er.denominator}",
        expected_return_decimal=str(fraction_to_decimal(er, 12)),
        expected_return_percent=str(fraction_to_decimal(er * 100, 4)),
        median=f"{median.numerator}/{median.denominator}",
        median_decimal=str(fraction_to_decimal(median)),
        median_ce_number=median_entry.ce_number,
        median_next_decimal=str(scaled_to_decimal(following.scaled_value)) if following else None,
        garbage_probability=f"{garbage.numerator}/{garbage.denominator}",
        garbage_probability_decimal=str(fraction_to_decimal(garbage, 7)),
        garbage_hands=garbage_hands(results),
        non_unique_classes=int((~results.unique).sum()),
    )


def sorted_class_order(results: SolvedTable) -> np.ndarray:
    """按最优期望降序、再按等价类序号升序的排列下标。"""
    return np.lexsort((results.positions, -results.best_ce))


def iter_sorted_classes(results: SolvedTable, d: CEDistribution) -> Iterator[tuple[int, int, SolveRow]]:
    """(排序后序号, 期望值名次, 行)，序号 1..N。"""
    order = sorted_class_order(results)
    numbers = ce_numbers(results, d)
    rows = list(results.to_rows())
    for sorted_no, i in enumerate(order.tolist(), start=1):
        yield sorted_no, int(numbers[i]), rows[i]


def distribution_rows(d: CEDistribution, compact: bool = False) -> Iterator[list[str]]:
    for e in d.entries:
        dec = scaled_to_decimal(e.scaled_value)
        text = _compact_decimal(dec) if compact else str(dec)
        yield [str(e.ce_number), str(e.classes_total), *(str(c) for c in e.classes_by_size),
               str(e.hand_weight), str(e.scaled_value), text]


def _compact_decimal(value: Decimal) -> str:
    text = f"{value:f}"
    return text.rstrip("0").rstrip(".") if "." in text else text


def write_distribution_csv(d: CEDistribution, path: str | Path, compact: bool = False) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(DISTRIBUTION_HEADER)
        writer.writerows(distribution_rows(d, compact=compact))
    return path


def render_distribution_text(d: CEDistribution, limit: int | None = None) -> str:
    header = f"{'no.':>5} {'classes':>8} {'sizes (4,12,24)':>22} {'weight':>8} {'scaled CE':>11} {'CE':>11}"
    lines = [header, "-" * len(header)]
    entries: Iterable[DistributionEntry] = d.entries if limit is None else d.entries[:limit]
    for e in entries:
        sizes = "({},{},{})".format(*e.classes_by_size)
        lines.append(
            f"{e.ce_number:>5} {e.classes_total:>8} {sizes:>22} {e.hand_weight:>8} "
            f"{e.scaled_value:>11} {scaled_to_decimal(e.scaled_value):>11}"
        )
    return "\n".join(lines)


def sorted_classes(results: SolvedTable) -> list[tuple[int, int, SolveRow]]:
    return list(iter_sorted_classes(results, build_distribution(results)))
