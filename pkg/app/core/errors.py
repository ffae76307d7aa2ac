from __future__ import annotations

from typing import Any


class SolverError(Exception):
    """求解器异常基类，exit_code 即命令行退出码。"""

    exit_code = 1

    def __init__(self, message: str, details: Any | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.details = details


class ConfigError(SolverError):
    """赔率表 / 排名表 / 缓存文件不合法。"""

    exit_code = 2


class UsageError(SolverError):
    """命令行参数或手牌字符串不合法。"""

    exit_code = 2


class ContractError(SolverError):
    """调用方违反前置条件。"""

    exit_code = 2


class CategoryError(SolverError):
    """保留牌组合无法归入任何保留类别。"""

    exit_code = 1


class VerificationError(SolverError):
    """精确校验未通过，details 中携带报告。"""

    exit_code = 1


class ScaleOverflowError(SolverError):
    exit_code = 3
