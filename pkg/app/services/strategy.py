"""可执行的手牌排名表：保留类别谓词、逐行首个命中的分类、穷举校验与初版排序推导。

排名表文件格式（每行）：`rank | kind | params | patterns`
- kind：`n-RF` / `n-SF` / `n-F` / `n-S` / `5-4K` / `5-FH` / `3-3K` / `4-2P` / `2-HP` / `2-LP` / `none`
- params（空格分隔）：`s=2`、`h=1/2`、`s+h>=3`、`held=JK/QK`、`!sp`、`fp@TJ`、`9sp@TK`
  `flag@XY` 表示手中同花的 XY 两张作为另一种保留时带有该罚分。
- patterns（空格分隔，任一匹配即可）：整手牌的描述，花括号内同花，不同花括号不同花，
  括号外的牌与所有花括号花色不同；点数原子为单个字符、`(a-b)` 区间或 `(a/b)` 枚举。
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from app.core.config import settings
from app.core.errors import CategoryError, ConfigError, ContractError
from app.models.cards import DENOMINATION_CHARS, Card, Hand
from app.schemas.strategy import CoverageRow, DerivedCategory, VerificationReport, Violation
from app.services.deck import HANDS_TOTAL, format_hand, resolve_config_path
from app.services.distribution import build_distribution, ce_numbers, fraction_to_decimal, scaled_to_decimal
from app.services.expect import SolvedTable, run_chunks

KINDS = ("RF", "SF", "F", "S", "4K", "FH", "3K", "2P", "HP", "LP", "none")

# 10 个顺子窗口，A 同时作 1 与 14
STRAIGHT_WINDOWS: tuple[frozenset[int], ...] = tuple(
    frozenset(14 if d == 1 else d for d in range(lo, lo + 5)) for lo in range(1, 11)
)

_MASKS_BY_SIZE: tuple[tuple[int, ...], ...] = tuple(
    tuple(m for m in range(32) if bin(m).count("1") == n) for n in range(6)
)


def _denom_value(ch: str) -> int:
    pos = DENOMINATION_CHARS.find(ch.upper())
    if pos < 0:
        raise ConfigError(f"unknown denomination {ch!r}")
    return pos + 2


def denomination_key(denoms: Iterable[int]) -> str:
    return "".join(DENOMINATION_CHARS[d - 2] for d in sorted(denoms))


def straights_count(denoms: Iterable[int]) -> int:
    """s：包含全部保留点数的顺子窗口个数（不看花色）。"""
    held = set(denoms)
    if not held:
        raise ContractError("straights_count needs at least one denomination")
    return sum(1 for w in STRAIGHT_WINDOWS if held <= w)


def high_count(denoms: Iterable[int]) -> int:
    return sum(1 for d in denoms if d >= 11)


@dataclass(frozen=True)
class PenaltyFlags:
    fp: bool
    sp: bool
    ninesp: bool

    def get(self, name: str) -> bool:
        return {"fp": self.fp, "sp": self.sp, "9sp": self.ninesp}[name]


def penalty_flags(hand: Hand, held: int) -> PenaltyFlags:
    """同花保留的罚分：fp 弃牌中有同花色；sp 弃牌点数落在可成顺窗口内；9sp 弃了 9。"""
    kept = hand.held(held)
    if not kept or len({c.suit for c in kept}) != 1:
        raise ContractError(f"penalty flags need a non-empty one-suit hold, got {format_hand(kept) or '-'}")
    suit = kept[0].suit
    kept_d = {c.denomination for c in kept}
    windows = [w for w in STRAIGHT_WINDOWS if kept_d <= w]
    thrown = hand.discarded(held)
    return PenaltyFlags(
        fp=any(c.suit == suit for c in thrown),
        sp=any(c.denomination not in kept_d and any(c.denomination in w for w in windows) for c in thrown),
        ninesp=any(c.denomination == 9 for c in thrown),
    )


def hold_kind(cards: Sequence[Card]) -> str | None:
    """保留牌的种类；不属于任何种类时返回 None。"""
    n = len(cards)
    if n == 0:
        return "none"
    counts = sorted(Counter(c.denomination for c in cards).values(), reverse=True)
    if n == 5 and counts == [4, 1]:
        return "4K"
    if n == 5 and counts == [3, 2]:
        return "FH"
    if counts == [3] and n == 3:
        return "3K"
    if counts == [2, 2] and n == 4:
        return "2P"
    if counts == [2] and n == 2:
        return "HP" if cards[0].denomination >= 11 else "LP"
    if counts[0] != 1:
        return None
    denoms = [c.denomination for c in cards]
    s = straights_count(denoms)
    if len({c.suit for c in cards}) == 1:
        if min(denoms) >= 10:
            return "RF"
        return "SF" if s >= 1 else "F"
    return "S" if s >= 1 else None


class HandView:
    """一手牌的保留特征缓存（种类、s、h、罚分），分类时按需计算。"""

    def __init__(self, hand: Hand) -> None:
        self.hand = hand
        self._kinds: dict[int, str | None] = {}
        self._by_kind: dict[tuple[str, int], tuple[int, ...]] = {}
        self._flags: dict[int, PenaltyFlags] = {}

    def kind(self, mask: int) -> str | None:
        if mask not in self._kinds:
            self._kinds[mask] = hold_kind(self.hand.held(mask))
        return self._kinds[mask]

    def masks_of(self, kind: str, n: int) -> tuple[int, ...]:
        key = (kind, n)
        if key not in self._by_kind:
            self._by_kind[key] = tuple(m for m in _MASKS_BY_SIZE[n] if self.kind(m) == kind)
        return self._by_kind[key]

    def denominations(self, mask: int) -> list[int]:
        return [c.denomination for c in self.hand.held(mask)]

    def flags(self, mask: int) -> PenaltyFlags:
        if mask not in self._flags:
            self._flags[mask] = penalty_flags(self.hand, mask)
        return self._flags[mask]

    def suited_alternatives(self, denoms: str) -> list[int]:
        """手中按给定点数各取一张且同花的保留掩码。"""
        wanted = [_denom_value(ch) for ch in denoms]
        options = [[i for i, c in enumerate(self.hand) if c.denomination == d] for d in wanted]
        masks = []
        for picks in product(*options):
            if len(set(picks)) != len(picks):
                continue
            if len({self.hand[i].suit for i in picks}) == 1:
                masks.append(sum(1 << i for i in picks))
        return masks


@dataclass(frozen=True)
class Compare:
    attr: str
    op: str
    values: tuple[int, ...]

    def test(self, view: HandView, mask: int) -> bool:
        denoms = view.denominations(mask)
        if not denoms or len(set(denoms)) != len(denoms):
            return False
        s, h = straights_count(denoms), high_count(denoms)
        actual = {"s": s, "h": h, "s+h": s + h}[self.attr]
        if self.op == ">=":
            return actual >= self.values[0]
        if self.op == "<=":
            return actual <= self.values[0]
        return actual in self.values

    @property
    def token(self) -> str:
        return f"{self.attr}{self.op}" + "/".join(str(v) for v in self.values)


@dataclass(frozen=True)
class Held:
    options: tuple[str, ...]

    def test(self, view: HandView, mask: int) -> bool:
        return denomination_key(view.denominations(mask)) in self.options

    @property
    def token(self) -> str:
        return "held=" + "/".join(self.options)


@dataclass(frozen=True)
class Flag:
    name: str
    expected: bool
    alternative: str | None = None

    def test(self, view: HandView, mask: int) -> bool:
        if self.alternative is None:
            return view.flags(mask).get(self.name) == self.expected
        return any(view.flags(alt).get(self.name) == self.expected
                   for alt in view.suited_alternatives(self.alternative))

    @property
    def token(self) -> str:
        text = ("" if self.expected else "!") + self.name
        return text + (f"@{self.alternative}" if self.alternative else "")


Constraint = Compare | Held | Flag

_COMPARE_RE = re.compile(r"(s\+h|s|h)(>=|<=|=)(\d+(?:/\d+)*)")
_HELD_RE = re.compile(r"held=([2-9TJQKA/]+)", re.IGNORECASE)
_FLAG_RE = re.compile(r"(!?)(fp|sp|9sp)(?:@([2-9TJQKA]+))?", re.IGNORECASE)


def parse_constraint(token: str) -> Constraint:
    if m := _COMPARE_RE.fullmatch(token):
        values = tuple(int(v) for v in m.group(3).split("/"))
        if m.group(2) != "=" and len(values) != 1:
            raise ConfigError(f"bad constraint {token!r}")
        return Compare(m.group(1), m.group(2), values)
    if m := _HELD_RE.fullmatch(token):
        options = tuple(denomination_key(_denom_value(ch) for ch in part) for part in m.group(1).split("/") if part)
        if not options:
            raise ConfigError(f"bad constraint {token!r}")
        return Held(options)
    if m := _FLAG_RE.fullmatch(token):
        alternative = denomination_key(_denom_value(ch) for ch in m.group(3)) if m.group(3) else None
        return Flag(m.group(2).lower(), not m.group(1), alternative)
    raise ConfigError(f"unknown constraint {token!r}")


@dataclass(frozen=True)
class PatternAtom:
    denominations: frozenset[int]
    group: int | None


@dataclass(frozen=True)
class HandPattern:
    text: str
    atoms: tuple[PatternAtom, ...] = field(compare=False)

    @classmethod
    def parse(cls, text: str) -> "HandPattern":
        atoms: list[PatternAtom] = []
        group: int | None = None
        groups = 0
        i = 0
        while i < len(text):
            ch = text[i]
            if ch == "{":
                if group is not None:
                    raise ConfigError(f"nested braces in pattern {text!r}")
                group, groups = groups, groups + 1
            elif ch == "}":
                if group is None:
                    raise ConfigError(f"unbalanced braces in pattern {text!r}")
                group = None
            elif ch == "(":
                end = text.find(")", i)
                if end < 0:
                    raise ConfigError(f"unclosed '(' in pattern {text!r}")
                atoms.append(PatternAtom(_parse_denomination_set(text[i + 1:end]), group))
                i = end
            else:
                atoms.append(PatternAtom(frozenset({_denom_value(ch)}), group))
            i += 1
        if group is not None or len(atoms) != 5:
            raise ConfigError(f"pattern {text!r} must describe exactly 5 cards")
        return cls(text=text, atoms=tuple(atoms))

    def matches(self, hand: Hand) -> bool:
        cards = hand.cards
        for order in permutations(range(5)):
            if not all(cards[ci].denomination in atom.denominations for atom, ci in zip(self.atoms, order)):
                continue
            group_suits: dict[int, set[int]] = {}
            loose: list[int] = []
            for atom, ci in zip(self.atoms, order):
                if atom.group is None:
                    loose.append(cards[ci].suit)
                else:
                    group_suits.setdefault(atom.group, set()).add(cards[ci].suit)
            if any(len(suits) != 1 for suits in group_suits.values()):
                continue
            used = [next(iter(suits)) for suits in group_suits.values()]
            if len(set(used)) != len(used) or any(s in used for s in loose):
                continue
            return True
        return False


def _parse_denomination_set(body: str) -> frozenset[int]:
    out: set[int] = set()
    for part in re.split(r"[,/]", body):
        part = part.strip()
        if "-" in part:
            lo, hi = (_denom_value(p) for p in part.split("-", 1))
            if lo > hi:
                raise ConfigError(f"empty denomination range {part!r}")
            out.update(range(lo, hi + 1))
        elif part:
            out.add(_denom_value(part))
    if not out:
        raise ConfigError(f"empty denomination set ({body})")
    return frozenset(out)


@dataclass(frozen=True)
class HoldCategory:
    kind: str
    n: int
    params: tuple[Constraint, ...] = ()
    patterns: tuple[HandPattern, ...] = ()

    @property
    def kind_label(self) -> str:
        return "none" if self.kind == "none" else f"{self.n}-{self.kind}"

    @property
    def label(self) -> str:
        extras = [c.token for c in self.params] + [p.text for p in self.patterns]
        return self.kind_label + (": " + " ".join(extras) if extras else "")

    def matches(self, view: HandView, mask: int) -> bool:
        if bin(mask).count("1") != self.n or view.kind(mask) != self.kind:
            return False
        if not all(c.test(view, mask) for c in self.params):
            return False
        return not self.patterns or any(p.matches(view.hand) for p in self.patterns)


@dataclass(frozen=True)
class RankRow:
    rank: int
    category: HoldCategory

    @property
    def label(self) -> str:
        return self.category.label


@dataclass(frozen=True)
class RankTable:
    name: str
    rows: tuple[RankRow, ...]

    def __post_init__(self) -> None:
        if not self.rows or self.rows[-1].category.kind != "none":
            raise ConfigError(f"rank table {self.name!r}: last row must be 'none'")
        ranks = [row.rank for row in self.rows]
        if ranks != list(range(1, len(ranks) + 1)):
            raise ConfigError(f"rank table {self.name!r}: ranks must run 1..{len(ranks)}")

    def __len__(self) -> int:
        return len(self.rows)


def parse_kind(token: str) -> tuple[str, int]:
    token = token.strip()
    if token == "none":
        return "none", 0
    m = re.fullmatch(r"([0-5])-(RF|SF|F|S|4K|FH|3K|2P|HP|LP)", token)
    if not m:
        raise ConfigError(f"unknown hold kind {token!r}")
    return m.group(2), int(m.group(1))


def parse_rank_table(text: str, name: str = "custom") -> RankTable:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split("|")]
        if not 2 <= len(parts) <= 4:
            raise ConfigError(f"rank table line {lineno}: expected 'rank | kind | params | patterns'")
        parts += [""] * (4 - len(parts))
        try:
            rank = int(parts[0])
        except ValueError as exc:
            raise ConfigError(f"rank table line {lineno}: bad rank {parts[0]!r}") from exc
        kind, n = parse_kind(parts[1])
        category = HoldCategory(
            kind=kind,
            n=n,
            params=tuple(parse_constraint(t) for t in parts[2].split()),
            patterns=tuple(HandPattern.parse(t) for t in parts[3].split()),
        )
        rows.append(RankRow(rank=rank, category=category))
    return RankTable(name=name, rows=tuple(rows))


def load_rank_table(source: str | Path | None = None) -> RankTable:
    path = resolve_config_path(source or settings.default_rank_table, settings.rank_table_dir, "rank table")
    return parse_rank_table(path.read_text(encoding="utf-8"), name=path.stem)


def dump_rank_table(table: RankTable) -> str:
    lines = [f"# {table.name}", "# rank | kind | params | patterns"]
    for row in table.rows:
        c = row.category
        params = " ".join(p.token for p in c.params)
        patterns = " ".join(p.text for p in c.patterns)
        lines.append(f"{row.rank} | {c.kind_label} | {params} | {patterns}".rstrip())
    return "\n".join(lines) + "\n"


def classify_row(hand: Hand, table: RankTable, view: HandView | None = None) -> tuple[int, RankRow]:
    """逐行扫描，行内按掩码升序取第一个满足的保留。"""
    view = view or HandView(hand)
    for row in table.rows:
        for mask in view.masks_of(row.category.kind, row.category.n):
            if row.category.matches(view, mask):
                return mask, row
    raise CategoryError(f"no row of {table.name!r} applies to {hand}")


def classify(hand: Hand, table: RankTable) -> int:
    return classify_row(hand, table)[0]


def categorize_hold_row(hand: Hand, mask: int, table: RankTable) -> RankRow:
    view = HandView(hand)
    for row in table.rows:
        if row.category.matches(view, mask):
            return row
    raise CategoryError(
        f"held cards {format_hand(hand.held(mask)) or '-'} of {hand} match no category of {table.name!r}"
    )


def categorize_hold(hand: Hand, mask: int, table: RankTable | None = None) -> HoldCategory:
    return categorize_hold_row(hand, mask, table or load_rank_table("table5")).category


def _classify_chunk(task: tuple[RankTable, list[list[int]]]) -> tuple[list[int], list[int]]:
    table, rows = task
    masks, ranks = [], []
    for row in rows:
        mask, hit = classify_row(Hand.from_indices(row), table)
        masks.append(mask)
        ranks.append(hit.rank)
    return masks, ranks


def classify_all(
        table: RankTable,
        results: SolvedTable,
        workers: int | None = None,
        chunk_size: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """每个等价类的 (分类掩码, 命中行号)，顺序与 results 一致。"""
    workers = workers or settings.workers
    chunk_size = chunk_size or settings.chunk_size
    cards = results.cards.tolist()
    tasks = [(table, cards[i:i + chunk_size]) for i in range(0, len(cards), chunk_size)]
    parts = run_chunks(_classify_chunk, tasks, workers, f"classify[{table.name}]")
    masks = np.asarray([m for part in parts for m in part[0]], dtype=np.int64)
    ranks = np.asarray([r for part in parts for r in part[1]], dtype=np.int64)
    return masks, ranks


def verify_table(
        table: RankTable,
        results: SolvedTable,
        workers: int | None = None,
        assignments: tuple[np.ndarray, np.ndarray] | None = None,
) -> VerificationReport:
    """分类掩码的期望必须等于最优期望；列出全部不一致的等价类。"""
    masks, ranks = assignments or classify_all(table, results, workers)
    idx = np.arange(len(results))
    got = results.ce[idx, masks]
    best_ce = results.best_ce
    rows = {row.rank: row for row in table.rows}
    violations = []
    for i in np.flatnonzero(got != best_ce).tolist():
        hand = results.hand(i)
        best = int(results.best[i])
        mask = int(masks[i])
        violations.append(Violation(
            class_index=int(results.positions[i]) + 1,
            hand=str(hand),
            rank=int(ranks[i]),
            row_label=rows[int(ranks[i])].label,
            classified_mask=mask,
            classified_hold=format_hand(hand.held(mask)) or "-",
            classified_ce=int(got[i]),
            best_mask=best,
            best_hold=format_hand(hand.held(best)) or "-",
            best_ce=int(best_ce[i]),
        ))
    return VerificationReport(
        table=table.name,
        paytable=results.table.name,
        classes_checked=len(results),
        violations=violations,
    )


def derive_preliminary(results: SolvedTable, categories: RankTable | None = None) -> list[DerivedCategory]:
    """按各保留类别出现的最小期望值名次排序。"""
    categories = categories or load_rank_table("table5")
    d = build_distribution(results)
    numbers = ce_numbers(results, d).tolist()
    best = results.best.tolist()
    seen: dict[int, list[int]] = {}
    for i in range(len(results)):
        row = categorize_hold_row(results.hand(i), best[i], categories)
        stats = seen.setdefault(row.rank, [numbers[i], numbers[i], 0])
        stats[0] = min(stats[0], numbers[i])
        stats[1] = max(stats[1], numbers[i])
        stats[2] += 1
    rows = {row.rank: row for row in categories.rows}
    derived = [
        DerivedCategory(label=rows[rank].label, table_rank=rank, ce_min=lo, ce_max=hi, classes=count)
        for rank, (lo, hi, count) in seen.items()
    ]
    return sorted(derived, key=lambda c: (c.ce_min, c.table_rank))


def compress_ranges(numbers: Iterable[int]) -> str:
    values = sorted(set(numbers))
    if not values:
        return ""
    parts = []
    start = prev = values[0]
    for v in values[1:] + [None]:
        if v is not None and v == prev + 1:
            prev = v
            continue
        parts.append(str(start) if start == prev else f"{start}-{prev}")
        if v is not None:
            start = prev = v
    return ", ".join(parts)


def rank_table_coverage(
        table: RankTable,
        results: SolvedTable,
        workers: int | None = None,
        assignments: tuple[np.ndarray, np.ndarray] | None = None,
) -> list[CoverageRow]:
    """每一行负责的期望值名次、条件期望区间与概率。"""
    masks, ranks = assignments or classify_all(table, results, workers)
    d = build_distribution(results)
    numbers = ce_numbers(results, d)
    played = results.ce[np.arange(len(results)), masks]
    orbit = results.orbit
    out = []
    for row in table.rows:
        sel = ranks == row.rank
        weight = int(orbit[sel].sum())
        prob = Fraction(weight, HANDS_TOTAL)
        has = bool(sel.any())
        out.append(CoverageRow(
            rank=row.rank,
            label=row.label,
            classes=int(sel.sum()),
            hand_weight=weight,
            probability=f"{prob.numerator}/{prob.denominator}",
            probability_decimal=str(fraction_to_decimal(prob, 8)),
            ce_numbers=sorted(set(numbers[sel].tolist())),
            ce_number_ranges=compress_ranges(numbers[sel].tolist()),
            ce_min_decimal=str(scaled_to_decimal(int(played[sel].min()))) if has else None,
            ce_max_decimal=str(scaled_to_decimal(int(played[sel].max()))) if has else None,
        ))
    return out


def double_listed(coverage: Sequence[CoverageRow]) -> list[int]:
    """出现在两行及以上的期望值名次。"""
    counts = Counter(n for row in coverage for n in row.ce_numbers)
    return sorted(n for n, c in counts.items() if c > 1)
