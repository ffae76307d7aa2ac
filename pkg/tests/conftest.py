import os

# 必须在导入 app 之前设置：Settings 在导入时读取环境变量
os.environ["VP_RUN_LOG_ENABLED"] = "0"
os.environ["VP_PROGRESS"] = "0"
os.environ.setdefault("VP_MEMO_CACHE_DIR", "")

from pathlib import Path

import pytest

from app.services.deck import load_paytable
from app.services.expect import build_memo, solve_all
from app.services.strategy import classify_all, load_rank_table

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def jacks_96():
    return load_paytable("jacks_or_better_9_6")


@pytest.fixture(scope="session")
def jacks_85():
    return load_paytable("jacks_or_better_8_5")


@pytest.fixture(scope="session")
def double_bonus():
    return load_paytable("double_bonus_10_7")


@pytest.fixture(scope="session")
def memo_96(jacks_96):
    return build_memo(jacks_96)


@pytest.fixture(scope="session")
def memo_db(double_bonus):
    return build_memo(double_bonus)


@pytest.fixture(scope="session")
def results_96(jacks_96, memo_96):
    return solve_all(jacks_96, "fast", memo=memo_96, workers=1)


@pytest.fixture(scope="session")
def results_db(double_bonus, memo_db):
    return solve_all(double_bonus, "fast", memo=memo_db, workers=1)


@pytest.fixture(scope="session")
def table5():
    return load_rank_table("table5")


@pytest.fixture(scope="session")
def table6():
    return load_rank_table("table6")


@pytest.fixture(scope="session")
def table6_assignments(table6, results_96):
    return classify_all(table6, results_96, workers=1)


@pytest.fixture(scope="session")
def table5_assignments(table5, results_96):
    return classify_all(table5, results_96, workers=1)
