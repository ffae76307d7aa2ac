import json

import pytest

import app.commands.common as common
from app.core.errors import UsageError
from app.main import create_parser, main
from app.schemas.solve import SolveRow


@pytest.fixture
def cached_memo(monkeypatch, memo_96):
    monkeypatch.setattr(common, "load_or_build_memo", lambda table: memo_96)


@pytest.fixture
def cached_solve(monkeypatch, cached_memo, results_96):
    monkeypatch.setattr(common, "solve_all", lambda table, backend, **kwargs: results_96)


class TestParser:
    def test_commands(self):
        parser = create_parser()
        for name in ("solve", "advise", "stats", "verify", "derive", "coverage"):
            assert parser.parse_args([name] if name != "advise" else [name, "Ah"]).command == name

    def test_command_required(self):
        with pytest.raises(SystemExit):
            create_parser().parse_args([])


class TestSolveRow:
    STRAIGHT_FLUSH = "1,4,2,3,4,5,6,1,1,1,1,1,1,1,1,1,1,383484750,u"

    def test_parse(self):
        row = SolveRow.from_csv_line(self.STRAIGHT_FLUSH)
        assert row.scaled_ce == 383_484_750
        assert row.to_csv_line() == self.STRAIGHT_FLUSH

    @pytest.mark.parametrize("line, message", [
        ("1,4,2,3,4,5,6,1,1,1,1,1,1,1,1,1,1,3.5,u", "non-integer"),
        ("1,4,2,3,4,5,6,1,1,1,1,1,1,1,1,1,1,abc,u", "non-integer"),
        ("1,4,2,3,4,5,6,1,1,1,1,1,1,1,1,1,1,383484750,x", "invalid CSV row"),
        ("1,4,2", "expected 19"),
    ])
    def test_malformed_lines(self, line, message):
        with pytest.raises(UsageError, match=message) as info:
            SolveRow.from_csv_line(line)
        assert info.value.exit_code == 2


class TestAdvise:
    def test_discard_the_eight(self, capsys, cached_memo):
        assert main(["advise", "8c Tc Jc Qc Kc"]) == 0
        out = capsys.readouterr().out
        assert "best: Tc Jc Qc Kc" in out
        assert "table6 rank 4" in out

    def test_split_tokens(self, capsys, cached_memo):
        assert main(["advise", "5c", "6d", "8h", "9s", "Tc"]) == 0
        out = capsys.readouterr().out
        assert "best: (discard all)" in out
        assert "2741080" in out
        assert "rank 38 (none)" in out

    def test_royal(self, capsys, cached_memo):
        assert main(["advise", "Tc Jc Qc Kc Ac"]) == 0
        assert "800.000000  <- best" in capsys.readouterr().out

    def test_bad_hand(self, capsys):
        assert main(["advise", "Ah Ah Kd Qc Js"]) == 2
        err = json.loads(capsys.readouterr().err)
        assert err["code"] == 2
        assert "duplicate" in err["message"]

    def test_unknown_paytable(self, capsys):
        assert main(["advise", "Ah Kd Qc Js 2c", "--paytable", "nope"]) == 2
        assert "unknown pay table" in json.loads(capsys.readouterr().err)["message"]


class TestSolve:
    def test_csv(self, tmp_path, cached_memo):
        out = tmp_path / "classes.csv"
        dist = tmp_path / "dist.csv"
        assert main(["solve", "-o", str(out), "--distribution", str(dist)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 134_459
        assert lines[0] == "1,4,2,3,4,5,6,1,1,1,1,1,1,1,1,1,1,383484750,u"
        assert all(SolveRow.from_csv_line(line).uniqueness == "n" for line in lines[-156:])
        assert len(dist.read_text(encoding="utf-8").splitlines()) == 1154

    def test_sample_needs_naive(self, capsys):
        assert main(["solve", "--sample", "5"]) == 2
        assert "--backend naive" in json.loads(capsys.readouterr().err)["message"]

    def test_naive_sample(self, tmp_path, results_96):
        out = tmp_path / "sample.csv"
        assert main(["solve", "--backend", "naive", "--sample", "3", "--seed", "5", "-o", str(out)]) == 0
        rows = [SolveRow.from_csv_line(line) for line in out.read_text(encoding="utf-8").splitlines()]
        assert len(rows) == 3
        for row in rows:
            assert row.scaled_ce == int(results_96.best_ce[row.class_index - 1])

    def test_xlsx(self, tmp_path, cached_solve):
        from openpyxl import load_workbook

        path = tmp_path / "book.xlsx"
        assert main(["solve", "-o", str(tmp_path / "c.csv"), "--xlsx", str(path)]) == 0
        wb = load_workbook(path, read_only=True)
        assert wb.sheetnames == ["classes", "distribution"]
        first = next(wb["classes"].iter_rows(min_row=2, max_row=2, values_only=True))
        assert first[19] == 6_135_756_000


class TestReports:
    def test_stats_json(self, capsys, cached_solve):
        assert main(["stats", "--json", "--check-counts"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data[0]["distinct_values"] == 1153
        assert data[0]["with_hold_values"] == 387
        assert data[0]["median"] == "4452/5405"

    def test_stats_text(self, capsys, cached_solve):
        assert main(["stats", "--distribution", "2"]) == 0
        out = capsys.readouterr().out
        assert "99.5439%" in out
        assert "distinct CE values:   1153" in out

    def test_verify_reports_violations(self, tmp_path, capsys, cached_solve):
        table = tmp_path / "lazy.txt"
        table.write_text("# always discard\n1 | none\n", encoding="utf-8")
        assert main(["verify", "--table", str(table), "--limit", "2"]) == 1
        out = capsys.readouterr().out
        assert "134459 classes" in out
        assert "more" in out

    def test_bad_rank_table(self, tmp_path, capsys):
        table = tmp_path / "broken.txt"
        table.write_text("1 | 5-RF\n", encoding="utf-8")
        assert main(["verify", "--table", str(table)]) == 2
