import hashlib
from math import comb

import numpy as np
import pytest

from app.core.config import settings
from app.core.errors import ConfigError, ScaleOverflowError, UsageError
from app.models.cards import Card, Hand
from app.services.canonical import SUIT_PERMUTATIONS, canonical_key, enumerate_classes
from app.services.deck import parse_hand
from app.services.expect import (
    DRAW_MULTIPLIER,
    MAX_SCALED,
    SCALE,
    ce_fast,
    ce_naive,
    ce_vector,
    check_scale,
    colex_rank,
    load_or_build_memo,
    sample_positions,
    select_best,
    solve_all,
    solve_class,
)


class TestScaling:
    def test_constants(self):
        assert SCALE == 7_669_695
        assert MAX_SCALED == 6_135_756_000
        assert DRAW_MULTIPLIER == (5, 43, 473, 7095, 163_185, SCALE)
        for k in range(6):
            assert DRAW_MULTIPLIER[k] * comb(47, 5 - k) == SCALE

    def test_colex_rank_is_dense(self):
        from itertools import combinations
        ranks = sorted(colex_rank(c) for c in combinations(range(10), 3))
        assert ranks == list(range(comb(10, 3)))

    def test_check_scale(self, jacks_96):
        check_scale(np.array([0, MAX_SCALED]), jacks_96)
        with pytest.raises(ScaleOverflowError):
            check_scale(np.array([MAX_SCALED + 1]), jacks_96)
        with pytest.raises(ScaleOverflowError):
            check_scale(np.array([-1]), jacks_96)


class TestSelectBest:
    def test_prefers_largest_mask_on_ties(self):
        ce = np.zeros(32, dtype=np.int64)
        ce[[3, 17, 30]] = 9
        best, unique = select_best(ce)
        assert int(best[0]) == 30
        assert not bool(unique[0])

    def test_unique(self):
        ce = np.arange(32, dtype=np.int64)[::-1].copy()
        best, unique = select_best(ce)
        assert int(best[0]) == 0
        assert bool(unique[0])


class TestSingleHand:
    def test_royal_is_800(self, jacks_96, memo_96):
        hand = parse_hand("Tc Jc Qc Kc Ac")
        ce = ce_vector(hand, jacks_96, memo=memo_96)
        assert int(ce[31]) == MAX_SCALED
        assert int(select_best(ce)[0][0]) == 31

    def test_discard_the_eight(self, jacks_96, memo_96):
        hand = parse_hand("8c Tc Jc Qc Kc")
        ce = ce_vector(hand, jacks_96, memo=memo_96)
        best, unique = select_best(ce)
        assert int(best[0]) == 0b11110
        assert bool(unique[0])
        assert int(ce[31]) == 6 * SCALE

    def test_garbage_hand(self, jacks_96, memo_96):
        hand = parse_hand("5c 6d 8h 9s Tc")
        ce = ce_vector(hand, jacks_96, memo=memo_96)
        best, _ = select_best(ce)
        assert int(best[0]) == 0
        assert int(ce[0]) == 2_741_080

    def test_hold_all_is_payout(self, jacks_96, memo_96):
        hand = parse_hand("7c 7d 7h 2s 2c")
        assert ce_fast(hand, 31, jacks_96, memo_96) == 9 * SCALE

    @pytest.mark.parametrize("text", ["2h 3h Jh Qh 5c", "Jc Jd 2h 5s 8c", "5c 6d 8h 9s Tc"])
    def test_fast_matches_naive(self, jacks_96, memo_96, text):
        hand = parse_hand(text)
        fast = ce_vector(hand, jacks_96, "fast", memo_96)
        for mask in (0, 1, 6, 15, 30, 31):
            assert ce_naive(hand, mask, jacks_96) == int(fast[mask])

    def test_suit_relabel_invariance(self, jacks_96, memo_96):
        hand = parse_hand("2h 3h Jh Qh 5c")
        base = ce_vector(hand, jacks_96, memo=memo_96)
        for perm in SUIT_PERMUTATIONS[::5]:
            other = Hand.of(Card(c.denomination, perm[c.suit]) for c in hand)
            assert (ce_vector(other, jacks_96, memo=memo_96) == base).all()

    def test_bad_mask(self, jacks_96, memo_96):
        with pytest.raises(UsageError):
            ce_fast(parse_hand("5c 6d 8h 9s Tc"), 32, jacks_96, memo_96)

    def test_memo_bound_to_paytable(self, jacks_85, memo_96):
        with pytest.raises(ConfigError, match="another pay table"):
            ce_vector(parse_hand("5c 6d 8h 9s Tc"), jacks_85, memo=memo_96)


class TestMemoCache:
    def test_round_trip(self, tmp_path, jacks_96, memo_96, monkeypatch):
        stored = load_or_build_memo(jacks_96, cache_dir=tmp_path)
        files = list(tmp_path.glob("memo-*.npz"))
        assert [f.name for f in files] == [f"memo-{jacks_96.fingerprint}.npz"]

        import app.services.expect as expect

        def _fail(table):
            raise AssertionError("memo should come from the cache")

        monkeypatch.setattr(expect, "build_memo", _fail)
        again = load_or_build_memo(jacks_96, cache_dir=tmp_path)
        assert again.fingerprint == memo_96.fingerprint
        assert all((a == b).all() for a, b in zip(again.tables, stored.tables))
        assert again.total(()) == memo_96.total(())

    @pytest.mark.parametrize("text", ["Jh Qh Kh", "2c 9d", "Ts Td Th As", "5h"])
    def test_exact_key_agrees_with_canonical_key(self, memo_96, text):
        cards = [Card.parse(t) for t in text.split()]
        exact = memo_96.total(tuple(sorted(c.index for c in cards)))
        assert exact == memo_96.total(canonical_key(cards))


class TestFullSolve:
    def test_shape(self, results_96):
        assert len(results_96) == 134_459
        assert results_96.complete
        assert results_96.ce.shape == (134_459, 32)

    def test_royal_row(self, results_96):
        rows = list(results_96.to_rows())
        royal = [r for r in rows if r.scaled_ce == MAX_SCALED]
        assert len(royal) == 1
        assert royal[0].uniqueness == "u"
        assert royal[0].hold_flags == [1, 1, 1, 1, 1]

    def test_non_unique_classes(self, results_96):
        expected = set()
        for i, equiv in enumerate(enumerate_classes()):
            if equiv.shape == "quads":
                expected.add(i)
            elif sorted(equiv.hand.denominations) == [10, 10, 11, 12, 13]:
                if max(equiv.hand.suits.count(s) for s in range(4)) <= 2:
                    expected.add(i)
        actual = set(np.flatnonzero(~results_96.unique).tolist())
        assert actual == expected

    def test_quads_rows(self, results_96):
        quads = [r for r in results_96[-156:]]
        assert all(not r.unique for r in quads)
        assert all(r.best_ce == 25 * SCALE for r in quads)

    def test_tie_break_keeps_the_second_ten(self, results_96):
        for r in results_96:
            if not r.unique and r.equiv_class.shape == "one_pair":
                assert r.hold_flags == (0, 1, 1, 1, 1)

    def test_hold_result_view(self, results_96):
        r = results_96[0]
        assert r.equiv_class.class_index == 1
        assert r.best_ce == max(r.ce)
        assert len(results_96[:3]) == 3

    def test_solve_class_agrees(self, jacks_96, memo_96, results_96):
        for pos in (0, 5_000, 70_000, 134_458):
            single = solve_class(enumerate_classes()[pos], jacks_96, memo=memo_96)
            assert single.ce == results_96[pos].ce
            assert single.best_mask == results_96[pos].best_mask

    def test_workers_do_not_change_output(self, jacks_96, memo_96, results_96):
        again = solve_all(jacks_96, "fast", memo=memo_96, workers=2, chunk_size=20_000)
        assert (again.ce == results_96.ce).all()
        digest = hashlib.sha256()
        expected = hashlib.sha256()
        for mine, theirs in zip(again.to_rows(), results_96.to_rows(), strict=True):
            digest.update((mine.to_csv_line() + "\n").encode())
            expected.update((theirs.to_csv_line() + "\n").encode())
        assert digest.hexdigest() == expected.hexdigest()


class TestNaiveOracle:
    def test_sample_positions_deterministic(self):
        a = sample_positions(134_459, 50, seed=3)
        b = sample_positions(134_459, 50, seed=3)
        assert (a == b).all()
        assert (np.diff(a) > 0).all()
        with pytest.raises(UsageError):
            sample_positions(10, 0)

    @pytest.mark.parametrize("table_name, results_name", [("jacks_96", "results_96"), ("double_bonus", "results_db")])
    def test_small_sample(self, request, table_name, results_name):
        table = request.getfixturevalue(table_name)
        results = request.getfixturevalue(results_name)
        naive = solve_all(table, "naive", sample=8, seed=11, workers=1)
        assert (naive.ce == results.ce[naive.positions]).all()
        assert (naive.best == results.best[naive.positions]).all()

    @pytest.mark.slow
    @pytest.mark.parametrize("table_name", ["jacks_96", "double_bonus"])
    def test_full_oracle_sample(self, request, table_name):
        table = request.getfixturevalue(table_name)
        results = request.getfixturevalue("results_96" if table_name == "jacks_96" else "results_db")
        naive = solve_all(table, "naive", sample=settings.oracle_sample, workers=settings.workers)
        assert len(naive) >= 500
        assert (naive.ce == results.ce[naive.positions]).all()
