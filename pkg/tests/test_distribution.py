import csv
from decimal import Decimal
from fractions import Fraction

import pytest

from app.core.errors import ContractError
from app.models.results import CEDistribution
from app.services.distribution import (
    CE80_CLASSES,
    CE83_CLASSES,
    DISTRIBUTION_HEADER,
    build_distribution,
    ce_numbers,
    class_count_checks,
    distribution_rows,
    er_numerator,
    expected_return,
    fraction_to_decimal,
    garbage_probability,
    garbage_values,
    median_bracket,
    median_ce,
    render_distribution_text,
    scaled_to_decimal,
    sorted_classes,
    summarize,
    with_hold_values,
    write_distribution_csv,
)
from tests.conftest import DATA_DIR

GOLDEN = DATA_DIR / "jacks_or_better_9_6_distribution.csv"


@pytest.fixture(scope="module")
def dist_96(results_96):
    return build_distribution(results_96)


class TestDecimals:
    @pytest.mark.parametrize("value, places, text", [
        (Fraction(1, 2), 0, "1"),
        (Fraction(5, 2), 0, "3"),
        (Fraction(4452, 5405), 6, "0.823682"),
        (Fraction(703, 21658), 7, "0.0324591"),
        (Fraction(1, 3), 6, "0.333333"),
    ])
    def test_half_up(self, value, places, text):
        assert fraction_to_decimal(value, places) == Decimal(text)

    def test_scaled(self):
        assert scaled_to_decimal(6_135_756_000) == Decimal("800")
        assert str(scaled_to_decimal(2_741_080)) == "0.357391"


class TestGolden:
    def test_appendix_rows(self, dist_96):
        with GOLDEN.open(encoding="utf-8") as f:
            reader = csv.reader(f)
            assert next(reader) == DISTRIBUTION_HEADER
            golden = list(reader)
        actual = list(distribution_rows(dist_96, compact=True))
        assert len(actual) == len(golden) == 1153
        for mine, theirs in zip(actual, golden):
            assert mine[:7] == theirs[:7]
            assert Decimal(mine[7]) == Decimal(theirs[7])

    def test_landmark_rows(self, dist_96):
        assert dist_96.entry(1).scaled_value == 6_135_756_000
        assert dist_96.entry(387).scaled_value == 3_284_985
        assert dist_96.entry(1153).scaled_value == 2_741_080
        assert dist_96.entry(387).garbage_classes == 0
        assert dist_96.entry(388).held_classes == 0

    def test_cumulative_columns(self, dist_96):
        last = dist_96.entries[-1]
        assert last.cumulative_classes == dist_96.total_classes == 134_459
        assert last.cumulative_weight == dist_96.total_weight == 2_598_960
        for e in dist_96.entries:
            assert e.hand_weight == 4 * e.classes_by_size[0] + 12 * e.classes_by_size[1] + 24 * e.classes_by_size[2]
            assert e.held_classes + e.garbage_classes == e.classes_total

    def test_csv_writer(self, tmp_path, dist_96):
        path = write_distribution_csv(dist_96, tmp_path / "out" / "dist.csv", compact=True)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == ",".join(DISTRIBUTION_HEADER)
        assert lines[1] == "1,1,1,0,0,4,6135756000,800"
        assert len(lines) == 1154


class TestStatistics:
    def test_expected_return(self, dist_96):
        assert er_numerator(dist_96) == 19_842_315_923_796
        assert expected_return(dist_96) == Fraction(1_653_526_326_983, 1_661_102_543_100)

    def test_value_counts(self, dist_96):
        assert len(dist_96) == 1153
        assert with_hold_values(dist_96) == 387
        assert garbage_values(dist_96) == 766

    def test_median(self, dist_96):
        assert median_ce(dist_96) == Fraction(4452, 5405)
        entry, following = median_bracket(dist_96)
        assert entry.cumulative_weight * 2 >= dist_96.total_weight
        assert following is not None

    def test_garbage_probability(self, results_96):
        assert garbage_probability(results_96) == Fraction(703, 21658)

    def test_combinatorial_class_counts(self, results_96, dist_96):
        assert CE80_CLASSES == 1909
        assert CE83_CLASSES == 271
        assert dist_96.entry(80).classes_total == 1909
        assert dist_96.entry(83).classes_total == 271
        assert dist_96.entry(32).classes_total == 17_562
        assert dist_96.entry(32).hand_weight == 337_464
        assert class_count_checks(results_96).passed

    def test_summary(self, results_96, jacks_96):
        report = summarize(results_96, jacks_96)
        assert report.distinct_values == 1153
        assert report.with_hold_values == 387
        assert report.expected_return_percent == "99.5439"
        assert report.median == "4452/5405"
        assert report.median_decimal == "0.823682"
        assert report.garbage_probability_decimal == "0.0324591"
        assert report.non_unique_classes > 156

    def test_double_bonus(self, results_db, double_bonus):
        d = build_distribution(results_db)
        assert len(d) == 773
        assert with_hold_values(d) == 469
        assert fraction_to_decimal(expected_return(d), 6) == Decimal("1.001725")
        assert summarize(results_db, double_bonus).expected_return_percent == "100.1725"

    def test_empty_distribution(self):
        empty = CEDistribution(entries=())
        with pytest.raises(ContractError):
            expected_return(empty)
        with pytest.raises(ContractError):
            median_bracket(empty)


class TestListings:
    def test_ce_numbers(self, results_96, dist_96):
        numbers = ce_numbers(results_96, dist_96)
        assert numbers.min() == 1
        assert numbers.max() == 1153
        royal = int(numbers.argmin())
        assert results_96.best_ce[royal] == 6_135_756_000

    def test_sorted_classes(self, results_96):
        listing = sorted_classes(results_96)
        assert [n for n, _, _ in listing[:3]] == [1, 2, 3]
        assert listing[0][2].scaled_ce == 6_135_756_000
        values = [row.scaled_ce for _, _, row in listing]
        assert values == sorted(values, reverse=True)
        assert listing[-1][1] == 1153

    def test_text_report(self, dist_96):
        text = render_distribution_text(dist_96, limit=3)
        lines = text.splitlines()
        assert len(lines) == 5
        assert "6135756000" in lines[2]
