"""精确条件期望：32 种保留方式，固定缩放因子 7,669,695 = 5·C(47,5) 下全部为整数。

两种后端：
- naive：枚举剩余 47 张中的全部 C(47, 5-k) 种补牌；
- fast：包含-排斥。对保留集 H 与弃牌集 D，
  sum_{补牌} payout = Σ_{S ⊆ D} (-1)^{|S|} T(H ∪ S)，
  T(X) 为包含 X 的全部 5 张手牌的赔付和，按子集大小预先建表（CompletionMemo）。

CompletionMemo 以精确牌集的 colex 序号为键，而不是 X 的花色规范形：
两者取值完全相同（T 在花色置换下不变），精确键查表只需一次下标取值。
"""
from __future__ import annotations

import multiprocessing
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache
from itertools import chain, combinations
from math import comb
from pathlib import Path
from typing import Any, Callable, Iterator

import numpy as np

from app.core.config import settings
from app.core.errors import ConfigError, ScaleOverflowError, UsageError
from app.core.run_log import progress_bar
from app.models.cards import Hand
from app.models.classes import EquivClass
from app.models.results import HoldResult
from app.schemas.paytable import PayTable
from app.schemas.solve import SolveRow
from app.services.canonical import ClassTable, class_table, enumerate_classes
from app.services.deck import all_hands, payouts_array

SCALE = 5 * comb(47, 5)
MAX_SCALED = 800 * SCALE
BACKENDS = ("fast", "naive")
HOLD_ALL = 31

# 保留 k 张时，补牌总和乘以 SCALE / C(47, 5-k) 得到缩放期望
DRAW_MULTIPLIER: tuple[int, ...] = tuple(SCALE // comb(47, 5 - k) for k in range(6))

_BINOM = np.array([[comb(n, k) for k in range(6)] for n in range(53)], dtype=np.int64)
_MASK_POSITIONS: tuple[tuple[int, ...], ...] = tuple(
    tuple(i for i in range(5) if mask >> i & 1) for mask in range(32)
)
_MULT_BY_MASK = np.array([DRAW_MULTIPLIER[len(p)] for p in _MASK_POSITIONS], dtype=np.int64)
_MASKS_WITHOUT = tuple(np.array([m for m in range(32) if not m >> b & 1]) for b in range(5))


def colex_rank(indices: Sequence[int]) -> int:
    """升序子集在同尺寸子集中的 colex 序号：Σ C(c_i, i+1)。"""
    return sum(comb(c, i + 1) for i, c in enumerate(sorted(indices)))


@dataclass(frozen=True)
class CompletionMemo:
    """T(X)：包含牌集 X（0–5 张）的全部手牌赔付和。tables[k] 以 colex 序号索引。"""

    fingerprint: str
    tables: tuple[np.ndarray, ...]

    def total(self, indices: Sequence[int]) -> int:
        return int(self.tables[len(indices)][colex_rank(indices)])

    def check(self, table: PayTable) -> None:
        if self.fingerprint != table.fingerprint:
            raise ConfigError(
                f"completion memo was built for another pay table ({self.fingerprint} != {table.fingerprint})"
            )


def build_memo(table: PayTable) -> CompletionMemo:
    hands = all_hands()
    pay = payouts_array(hands, table)
    ids = hands.astype(np.int64)
    tables = [np.zeros(comb(52, k), dtype=np.int64) for k in range(6)]
    for mask in progress_bar(range(32), total=32, desc="memo"):
        positions = _MASK_POSITIONS[mask]
        if not positions:
            tables[0][0] = pay.sum()
            continue
        rank = sum(_BINOM[ids[:, p], j + 1] for j, p in enumerate(positions))
        np.add.at(tables[len(positions)], rank, pay)
    for t in tables:
        t.flags.writeable = False
    return CompletionMemo(fingerprint=table.fingerprint, tables=tuple(tables))


def load_or_build_memo(table: PayTable, cache_dir: str | Path | None = None) -> CompletionMemo:
    """优先读取 .npz 缓存（以赔率表指纹命名），缺失或损坏时重建并写回。"""

    root = Path(cache_dir) if cache_dir is not None else settings.memo_cache_path
    if root is None:
        return build_memo(table)

    path = root / f"memo-{table.fingerprint}.npz"
    if path.is_file():
        try:
            with np.load(path) as data:
                stored = str(data["fingerprint"])
                tables = tuple(data[f"t{k}"] for k in range(6))
            if stored == table.fingerprint and all(len(t) == comb(52, k) for k, t in enumerate(tables)):
                return CompletionMemo(fingerprint=stored, tables=tables)
        except (OSError, ValueError, KeyError):
            pass  # 缓存损坏时重建

    memo = build_memo(table)
    root.mkdir(parents=True, exist_ok=True)
    np.savez(path, fingerprint=np.array(memo.fingerprint), **{f"t{k}": t for k, t in enumerate(memo.tables)})
    return memo


def _ce_fast_batch(cards: np.ndarray, tables: tuple[np.ndarray, ...]) -> np.ndarray:
    """(N, 5) 手牌 -> (N, 32) 缩放期望；掩码位 i 对应升序第 i 张。"""
    cards = np.sort(np.asarray(cards, dtype=np.int64), axis=1)
    t = np.empty((len(cards), 32), dtype=np.int64)
    for mask, positions in enumerate(_MASK_POSITIONS):
        if not positions:
            t[:, 0] = tables[0][0]
            continue
        rank = sum(_BINOM[cards[:, p], j + 1] for j, p in enumerate(positions))
        t[:, mask] = tables[len(positions)][rank]
    # 超集 Möbius 变换：t[m] -> Σ_{S ⊇ m} (-1)^{|S \ m|} T(S)
    for bit in range(5):
        lower = _MASKS_WITHOUT[bit]
        t[:, lower] -= t[:, lower | (1 << bit)]
    return t * _MULT_BY_MASK


@lru_cache(maxsize=6)
def _draw_positions(n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    flat = np.fromiter(chain.from_iterable(combinations(range(47), n)), dtype=np.int8, count=n * comb(47, n))
    return flat.reshape(-1, n)


def _ce_naive_single(indices: Sequence[int], mask: int, table: PayTable) -> int:
    ids = sorted(int(i) for i in indices)
    held = [ids[p] for p in _MASK_POSITIONS[mask]]
    unseen = np.setdiff1d(np.arange(52), ids)
    draws = unseen[_draw_positions(5 - len(held))]
    finals = np.hstack([np.broadcast_to(np.asarray(held, dtype=np.int64), (len(draws), len(held))), draws])
    return int(payouts_array(finals, table).sum()) * DRAW_MULTIPLIER[len(held)]


def ce_naive(hand: Hand, mask: int, table: PayTable) -> int:
    _check_mask(mask)
    return _ce_naive_single(hand.indices, mask, table)


def ce_fast(hand: Hand, mask: int, table: PayTable, memo: CompletionMemo) -> int:
    _check_mask(mask)
    memo.check(table)
    return int(_ce_fast_batch(np.asarray([hand.indices]), memo.tables)[0, mask])


def ce_vector(hand: Hand, table: PayTable, backend: str = "fast", memo: CompletionMemo | None = None) -> np.ndarray:
    """任意手牌的 32 个缩放期望（掩码按该手牌升序）。"""
    _check_backend(backend)
    if backend == "naive":
        ce = np.array([_ce_naive_single(hand.indices, m, table) for m in range(32)], dtype=np.int64)
    else:
        memo = memo or load_or_build_memo(table)
        memo.check(table)
        ce = _ce_fast_batch(np.asarray([hand.indices]), memo.tables)[0]
    check_scale(ce, table)
    return ce


def select_best(ce: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """并列最大时取数值最大的掩码；unique 表示最大值只出现一次。

    第 i 位对应按（点数, 花色）升序的第 i 张牌，因此 TTJQK 并列时保留的是排在后面的那张 T；
    并列时任一最优保留的期望相同，统计量不受影响。
    """
    ce = np.atleast_2d(ce)
    best = HOLD_ALL - np.argmax(ce[:, ::-1], axis=1)
    top = ce.max(axis=1)
    unique = (ce == top[:, None]).sum(axis=1) == 1
    return best.astype(np.int8), unique


def check_scale(ce: np.ndarray, table: PayTable) -> None:
    limit = table.max_payout * SCALE
    if ce.size and (int(ce.min()) < 0 or int(ce.max()) > limit):
        raise ScaleOverflowError(
            f"scaled CE outside [0, {limit}]",
            details={"min": int(ce.min()), "max": int(ce.max())},
        )


def solve_class(
        equiv_class: EquivClass,
        table: PayTable,
        backend: str = "fast",
        memo: CompletionMemo | None = None,
) -> HoldResult:
    ce = ce_vector(equiv_class.hand, table, backend, memo)
    best, unique = select_best(ce)
    return HoldResult(
        equiv_class=equiv_class,
        ce=tuple(int(v) for v in ce),
        best_mask=int(best[0]),
        unique=bool(unique[0]),
    )


class SolvedTable(Sequence):
    """solve_all 的结果：按枚举顺序存放的 (N, 32) 整数矩阵，按需构造 HoldResult。"""

    def __init__(
            self,
            table: PayTable,
            classes: ClassTable,
            positions: np.ndarray,
            ce: np.ndarray,
            best: np.ndarray,
            unique: np.ndarray,
    ) -> None:
        self.table = table
        self.classes = classes
        self.positions = positions
        self.ce = ce
        self.best = best
        self.unique = unique

    def __len__(self) -> int:
        return len(self.positions)

    def __getitem__(self, item: Any) -> Any:
        if isinstance(item, slice):
            return [self[i] for i in range(*item.indices(len(self)))]
        i = int(item)
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(item)
        return HoldResult(
            equiv_class=enumerate_classes()[int(self.positions[i])],
            ce=tuple(int(v) for v in self.ce[i]),
            best_mask=int(self.best[i]),
            unique=bool(self.unique[i]),
        )

    @property
    def complete(self) -> bool:
        return len(self) == len(self.classes)

    @property
    def best_ce(self) -> np.ndarray:
        return self.ce[np.arange(len(self)), self.best]

    @property
    def orbit(self) -> np.ndarray:
        return self.classes.orbit[self.positions]

    @property
    def cards(self) -> np.ndarray:
        return self.classes.cards[self.positions]

    def hand(self, i: int) -> Hand:
        return self.classes.hand(int(self.positions[i]))

    def to_rows(self) -> Iterator[SolveRow]:
        cards = self.cards.tolist()
        best_ce = self.best_ce.tolist()
        for i, row in enumerate(cards):
            mask = int(self.best[i])
            yield SolveRow(
                class_index=int(self.positions[i]) + 1,
                orbit_size=int(self.orbit[i]),
                denominations=[c // 4 + 2 for c in row],
                suit_labels=[c % 4 + 1 for c in row],
                hold_flags=[mask >> b & 1 for b in range(5)],
                scaled_ce=best_ce[i],
                uniqueness="u" if self.unique[i] else "n",
            )


def sample_positions(total: int, sample: int, seed: int | None = None) -> np.ndarray:
    """确定性均匀抽样（不放回），升序返回。"""
    if sample <= 0:
        raise UsageError("sample must be positive")
    if sample >= total:
        return np.arange(total)
    rng = np.random.default_rng(settings.oracle_seed if seed is None else seed)
    return np.sort(rng.choice(total, size=sample, replace=False))


# 进程池内共享的只读表，由 initializer 安装
_WORKER_TABLES: tuple[np.ndarray, ...] | None = None


def _install_memo(tables: tuple[np.ndarray, ...]) -> None:
    global _WORKER_TABLES
    _WORKER_TABLES = tables


def _solve_chunk_fast(cards: np.ndarray) -> np.ndarray:
    return _ce_fast_batch(cards, _WORKER_TABLES)


def _solve_chunk_naive(task: tuple[np.ndarray, PayTable]) -> np.ndarray:
    cards, table = task
    return np.array(
        [[_ce_naive_single(row, m, table) for m in range(32)] for row in cards.tolist()],
        dtype=np.int64,
    ).reshape(-1, 32)


def run_chunks(
        worker: Callable[[Any], Any],
        tasks: list[Any],
        workers: int,
        desc: str,
        initializer: Callable[..., None] | None = None,
        initargs: tuple[Any, ...] = (),
) -> list[Any]:
    """imap 保持提交顺序，结果与进程数无关。"""
    if workers <= 1 or len(tasks) <= 1:
        if initializer:
            initializer(*initargs)
        return [worker(task) for task in progress_bar(tasks, total=len(tasks), desc=desc)]
    with multiprocessing.Pool(processes=workers, initializer=initializer, initargs=initargs) as pool:
        return list(progress_bar(pool.imap(worker, tasks), total=len(tasks), desc=desc))


def solve_all(
        table: PayTable,
        backend: str | None = None,
        *,
        memo: CompletionMemo | None = None,
        workers: int | None = None,
        chunk_size: int | None = None,
        sample: int | None = None,
        seed: int | None = None,
) -> SolvedTable:
    backend = backend or settings.backend
    _check_backend(backend)
    workers = workers or settings.workers
    chunk_size = chunk_size or settings.chunk_size

    classes = class_table()
    positions = np.arange(len(classes)) if sample is None else sample_positions(len(classes), sample, seed)
    cards = classes.cards[positions]

    if backend == "fast":
        memo = memo or load_or_build_memo(table)
        memo.check(table)
        chunks = [cards[i:i + chunk_size] for i in range(0, len(cards), chunk_size)]
        parts = run_chunks(_solve_chunk_fast, chunks, workers, "solve", _install_memo, (memo.tables,))
    else:
        # naive 每类约 2.6M 次评估，小块分发
        step = min(chunk_size, 4)
        tasks = [(cards[i:i + step], table) for i in range(0, len(cards), step)]
        parts = run_chunks(_solve_chunk_naive, tasks, workers, "solve-naive")

    ce = np.vstack(parts) if parts else np.zeros((0, 32), dtype=np.int64)
    check_scale(ce, table)
    best, unique = select_best(ce)
    return SolvedTable(table=table, classes=classes, positions=positions, ce=ce, best=best, unique=unique)


def _check_backend(backend: str) -> None:
    if backend not in BACKENDS:
        raise UsageError(f"unknown backend {backend!r}; choose from {', '.join(BACKENDS)}")


def _check_mask(mask: int) -> None:
    if not 0 <= mask <= HOLD_ALL:
        raise UsageError(f"hold mask out of range: {mask}")
