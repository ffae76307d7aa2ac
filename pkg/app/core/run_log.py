from __future__ import annotations

import json
import sys
import uuid
from contextlib import contextmanager
from dataclasses import asdict, is_dataclass
from datetime import date, datetime
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Iterator

import numpy as np
from pydantic import BaseModel
from tqdm import tqdm

from app.core.config import settings


def to_json_safe(value: Any) -> Any:
    """作用：递归转换为 JSON 安全类型，避免 Fraction / numpy 标量序列化失败。"""
    if isinstance(value, (datetime, date)):
        return value.isoformat()
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, Decimal):
        return str(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [to_json_safe(item) for item in value.tolist()]
    if isinstance(value, BaseModel):
        return to_json_safe(value.model_dump())
    if is_dataclass(value) and not isinstance(value, type):
        return to_json_safe(asdict(value))
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, dict):
        return {str(key): to_json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [to_json_safe(item) for item in value]
    return value


class RunLogger:
    """按运行 ID 记录每个步骤的输入输出。

    落盘路径：<run_log_dir>/<run_id>/<step_name>/<YYYYmmdd-HH-MM-SS-ffffff>-<status>.json
    """

    def __init__(
            self,
            command: str,
            run_id: str | None = None,
            root: str | Path | None = None,
            enabled: bool | None = None,
    ) -> None:
        self.command = command
        self.run_id = run_id or uuid.uuid4().hex[:16]
        self.root = Path(root if root is not None else settings.run_log_dir)
        self.enabled = settings.run_log_enabled if enabled is None else enabled

    def record(
            self,
            step_name: str,
            step_input: dict[str, Any],
            step_output: dict[str, Any] | None,
            status: str,
            error_message: str | None,
    ) -> Path | None:
        """作用：保存步骤输入输出到本地。

        输入参数：
        - step_name: str。
        - step_input: dict[str, Any]。
        - step_output: dict[str, Any] | None。
        - status: str，success / failed。
        - error_message: str | None。

        输出参数：
        - 返回值类型: Path | None，未启用时为 None。
        """

        if not self.enabled:
            return None
        step_dir = self.root / self.run_id / step_name
        step_dir.mkdir(parents=True, exist_ok=True)
        ts = datetime.now().strftime("%Y%m%d-%H-%M-%S-%f")
        file_path = step_dir / f"{ts}-{status}.json"
        payload_data = {
            "run_id": self.run_id,
            "command": self.command,
            "step_name": step_name,
            "status": status,
            "error_message": error_message,
            "timestamp": datetime.now().isoformat(timespec="seconds"),
            "input": step_input,
            "output": step_output,
        }
        file_path.write_text(
            json.dumps(to_json_safe(payload_data), ensure_ascii=False, indent=2, default=str),
            encoding="utf-8",
        )
        return file_path

    @contextmanager
    def step(self, step_name: str, step_input: dict[str, Any] | None = None) -> Iterator[dict[str, Any]]:
        """步骤包装：调用方往 yield 出的 dict 里写输出，异常时记为 failed 并继续抛出。"""
        step_input = step_input or {}
        output: dict[str, Any] = {}
        try:
            yield output
        except Exception as exc:
            self.record(step_name, step_input, output or None, "failed", f"{exc.__class__.__name__}: {exc}")
            raise
        self.record(step_name, step_input, output, "success", None)


def progress_bar(iterable: Iterable[Any] | None = None, *, total: int | None = None, desc: str = "", **kwargs: Any) -> tqdm:
    return tqdm(
        iterable,
        total=total,
        desc=desc,
        file=sys.stderr,
        disable=not settings.progress,
        leave=False,
        **kwargs,
    )
