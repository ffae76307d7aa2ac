from __future__ import annotations

from pathlib import Path

from openpyxl import Workbook

from app.core.run_log import progress_bar
from app.services.distribution import (
    DISTRIBUTION_HEADER,
    build_distribution,
    iter_sorted_classes,
    scaled_to_decimal,
)
from app.services.expect import SolvedTable

CLASS_HEADER = [
    "sorted_no", "ce_no", "class", "orbit",
    "d1", "d2", "d3", "d4", "d5",
    "s1", "s2", "s3", "s4", "s5",
    "h1", "h2", "h3", "h4", "h5",
    "scaled", "decimal", "unique",
]


def export_workbook(results: SolvedTable, path: str | Path) -> Path:
    """作用：导出两张表：按期望降序排列的全部等价类、期望值分布。

    输入参数：
    - results: SolvedTable，solve_all 的结果。
    - path: str | Path，xlsx 输出路径。

    输出参数：
    - 返回值类型: Path。
    """

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    d = build_distribution(results)

    wb = Workbook(write_only=True)
    classes_ws = wb.create_sheet("classes")
    classes_ws.append(CLASS_HEADER)
    for sorted_no, ce_number, row in progress_bar(
            iter_sorted_classes(results, d), total=len(results), desc="xlsx"):
        classes_ws.append([
            sorted_no, ce_number, row.class_index, row.orbit_size,
            *row.denominations, *row.suit_labels, *row.hold_flags,
            row.scaled_ce, float(scaled_to_decimal(row.scaled_ce)), row.uniqueness,
        ])

    dist_ws = wb.create_sheet("distribution")
    dist_ws.append(DISTRIBUTION_HEADER + ["cum_classes", "cum_weight", "held", "garbage"])
    for e in d.entries:
        dist_ws.append([
            e.ce_number, e.classes_total, *e.classes_by_size, e.hand_weight,
            e.scaled_value, float(scaled_to_decimal(e.scaled_value)),
            e.cumulative_classes, e.cumulative_weight, e.held_classes, e.garbage_classes,
        ])
    wb.save(path)
    return path
