import os
from pathlib import Path

try:
    from dotenv import load_dotenv
except ImportError:
    load_dotenv = None

ROOT_DIR = Path(__file__).resolve().parents[2]

if load_dotenv:
    load_dotenv(ROOT_DIR / ".env")


def _env_flag(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() not in {"0", "false", "no", "off", ""}


class Settings:
    app_name = "vp_exact"

    # 内置配置目录：赔率表、手牌排名表
    paytable_dir = os.getenv("VP_PAYTABLE_DIR", str(ROOT_DIR / "app" / "knowledge" / "paytables"))
    rank_table_dir = os.getenv("VP_RANK_TABLE_DIR", str(ROOT_DIR / "app" / "knowledge" / "rank_tables"))
    default_paytable = os.getenv("VP_DEFAULT_PAYTABLE", "jacks_or_better_9_6")
    default_rank_table = os.getenv("VP_DEFAULT_RANK_TABLE", "table6")

    _raw_backend = os.getenv("VP_BACKEND", "fast").strip().lower()
    backend = _raw_backend if _raw_backend in {"fast", "naive"} else "fast"

    workers = max(1, int(os.getenv("VP_WORKERS", "1")))
    chunk_size = max(1, int(os.getenv("VP_CHUNK_SIZE", "4096")))

    # 为空表示不落盘缓存
    memo_cache_dir = os.getenv("VP_MEMO_CACHE_DIR", "local_logs/memo_cache")

    run_log_dir = os.getenv("VP_RUN_LOG_DIR", "local_logs/run_io")
    run_log_enabled = _env_flag("VP_RUN_LOG_ENABLED", "1")
    progress = _env_flag("VP_PROGRESS", "1")

    oracle_sample = max(1, int(os.getenv("VP_ORACLE_SAMPLE", "500")))
    oracle_seed = int(os.getenv("VP_ORACLE_SEED", "20240101"))

    @property
    def memo_cache_path(self) -> Path | None:
        if not self.memo_cache_dir:
            return None
        return Path(self.memo_cache_dir)


settings = Settings()
