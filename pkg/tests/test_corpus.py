"""Corpus ingestion, pairing, splitting, metrics and evaluation tests."""

import json

import pytest

from clef.corpus import (
    IngestError,
    dissimilarity,
    dump_report,
    evaluate,
    group_users,
    ingest,
    is_high_quality,
    learn_pool,
    make_pairs,
    relative_repair_size,
    report_table,
    split_users,
)
from clef.judge import Outcome
from clef.nodes import node_count
from clef.parser import parse

from conftest import requires_gcc
from fixtures import (
    FIG2A,
    FIG2B,
    FIG2C,
    FIG3A,
    FIG3B,
    FIG3C,
    UNFIXABLE,
    bit_count_suite,
    build_corpus,
    rename_vars,
)

MINIMAL = "int main(){ return 0; }\n"


def _corpus(tmp_path, histories, problem="bitcnt"):
    build_corpus(tmp_path, problem, histories, bit_count_suite())
    return ingest(tmp_path, problem)


class TestIngest:
    def test_empty_users_dir(self, tmp_path):
        (tmp_path / "p" / "users").mkdir(parents=True)
        db = ingest(tmp_path, "p")
        assert db.users == {}

    def test_two_ordered_records(self, tmp_path):
        db = _corpus(tmp_path, {"u1": [(2, "AC", FIG2B), (1, "WA", FIG2A)]})
        recs = db.users["u1"]
        assert [r.seq for r in recs] == [1, 2]
        assert [r.recorded_outcome for r in recs] == [Outcome.WRONG_ANSWER, Outcome.ACCEPTED]

    def test_duplicate_order_key_rejected(self, tmp_path):
        udir = tmp_path / "p" / "users" / "u1"
        udir.mkdir(parents=True)
        (udir / "1_WA.c").write_text(MINIMAL)
        (udir / "1_AC.c").write_text(MINIMAL)
        with pytest.raises(IngestError):
            ingest(tmp_path, "p")

    def test_bad_filename_rejected(self, tmp_path):
        udir = tmp_path / "p" / "users" / "u1"
        udir.mkdir(parents=True)
        (udir / "notes.txt").write_text("hello")
        with pytest.raises(IngestError):
            ingest(tmp_path, "p")

    def test_unknown_verdict_code_rejected(self, tmp_path):
        udir = tmp_path / "p" / "users" / "u1"
        udir.mkdir(parents=True)
        (udir / "1_XX.c").write_text(MINIMAL)
        with pytest.raises(IngestError):
            ingest(tmp_path, "p")

    def test_missing_layout_rejected(self, tmp_path):
        with pytest.raises(IngestError):
            ingest(tmp_path, "absent")

    def test_unparsable_retained_with_flag(self, tmp_path):
        db = _corpus(tmp_path, {"u1": [(1, "CE", "int main(){ return }"), (2, "AC", FIG2B)]})
        recs = db.users["u1"]
        assert not recs[0].parses and recs[0].parse_error
        assert recs[1].parses


class TestMakePairs:
    def test_all_combinations(self, tmp_path):
        db = _corpus(
            tmp_path,
            {"u1": [(1, "WA", FIG2A), (2, "WA", FIG3A), (3, "AC", FIG2B)]},
        )
        pairs = make_pairs(db)
        assert [(p.incorrect.seq, p.correct.seq) for p in pairs] == [(1, 3), (2, 3)]

    def test_first_attempt_solvers_dropped(self, tmp_path):
        db = _corpus(tmp_path, {"u1": [(1, "AC", FIG2B), (2, "WA", FIG2A)]})
        assert make_pairs(db) == []

    def test_incorrect_only_user_yields_nothing(self, tmp_path):
        db = _corpus(tmp_path, {"u1": [(1, "WA", FIG2A)]})
        assert make_pairs(db) == []

    def test_syntax_errors_dropped(self, tmp_path):
        db = _corpus(
            tmp_path,
            {"u1": [(1, "WA", "int main() { return }"), (2, "WA", FIG2A), (3, "AC", FIG2B)]},
        )
        pairs = make_pairs(db)
        assert [(p.incorrect.seq, p.correct.seq) for p in pairs] == [(2, 3)]


class TestSplit:
    def _db12(self, tmp_path):
        histories = {f"u{i:02d}": [(1, "WA", FIG2A), (2, "AC", FIG2B)] for i in range(1, 13)}
        return _corpus(tmp_path, histories)

    def test_floor_split(self, tmp_path):
        db = self._db12(tmp_path)
        train, evaluation = split_users(db, ratio=0.8, seed=1)
        assert len(train.users) == 9  # floor(0.8 * 12)
        assert len(evaluation.users) == 3

    def test_no_leakage(self, tmp_path):
        db = self._db12(tmp_path)
        train, evaluation = split_users(db, ratio=0.8, seed=1)
        assert set(train.users).isdisjoint(evaluation.users)
        assert set(train.users) | set(evaluation.users) == set(db.users)

    def test_seed_determinism(self, tmp_path):
        db = self._db12(tmp_path)
        t1, e1 = split_users(db, seed=42)
        t2, e2 = split_users(db, seed=42)
        assert t1.user_ids() == t2.user_ids()
        t3, _ = split_users(db, seed=43)
        assert t1.user_ids() != t3.user_ids()

    def test_fifty_fifty_two_users(self, tmp_path):
        db = _corpus(
            tmp_path,
            {"a": [(1, "WA", FIG2A)], "b": [(1, "WA", FIG2A)]},
        )
        train, evaluation = split_users(db, ratio=0.5, seed=0)
        assert len(train.users) == 1 and len(evaluation.users) == 1

    def test_bad_ratio(self, tmp_path):
        db = self._db12(tmp_path)
        with pytest.raises(ValueError):
            split_users(db, ratio=1.0)


class TestGroups:
    def test_partition(self, tmp_path):
        db = _corpus(
            tmp_path,
            {
                "giveup": [(1, "WA", FIG2A)],
                "solver": [(1, "WA", FIG2A), (2, "AC", FIG2B)],
                "instant": [(1, "AC", FIG2B)],
            },
        )
        one, two = group_users(db)
        assert one == ["giveup"]
        assert two == ["solver"]


class TestMetrics:
    def test_dissimilarity_zero_when_in_set(self):
        t = parse(FIG2B)
        assert dissimilarity(t, [parse(FIG2A), parse(FIG2B)]) == 0

    def test_dissimilarity_definition(self):
        t = parse(FIG2A)
        d = dissimilarity(t, [parse(FIG2C)])
        assert d == 6 / node_count(t)

    def test_dissimilarity_monotone_in_set(self):
        t = parse(FIG2A)
        d_small = dissimilarity(t, [parse(FIG2C)])
        d_big = dissimilarity(t, [parse(FIG2C), parse(FIG2B)])
        assert d_big <= d_small

    def test_dissimilarity_empty_set_rejected(self):
        with pytest.raises(ValueError):
            dissimilarity(parse(FIG2A), [])

    def test_relative_repair_size(self):
        t = parse(FIG2A)
        assert relative_repair_size(t, t) == 0
        assert relative_repair_size(parse(FIG2B), t) == 1 / node_count(t)
        t3 = parse(FIG3A)
        assert relative_repair_size(parse(FIG3B), t3) == 2 / node_count(t3)

    def test_high_quality_strict(self):
        assert is_high_quality(parse(FIG2B), parse(FIG2A), parse(FIG2C))
        assert not is_high_quality(parse(FIG2C), parse(FIG2A), parse(FIG2C))
        assert is_high_quality(parse(FIG3B), parse(FIG3A), parse(FIG3C))


@requires_gcc
class TestEvaluate:
    def test_five_user_fixture_rate(self, tmp_path):
        # training user supplies the conditional-to-loop fix; three eval users
        # planted that bug (renamed), two are out of the pool's reach
        train_db = _corpus(
            tmp_path / "train",
            {"t1": [(1, "WA", FIG2A), (2, "AC", FIG2B)]},
        )
        eval_histories = {
            "e1": [(1, "WA", rename_vars(FIG2A, {"x": "n1", "c": "m1"}))],
            "e2": [(1, "WA", rename_vars(FIG2A, {"x": "n2", "c": "m2"}))],
            "e3": [(1, "WA", rename_vars(FIG2A, {"x": "n3", "c": "m3"}))],
            "e4": [(1, "WA", UNFIXABLE)],
            "e5": [(1, "WA", UNFIXABLE.replace("z * 2", "z * 3"))],
        }
        eval_db = _corpus(tmp_path / "eval", eval_histories)
        report = evaluate(train_db, eval_db, bit_count_suite(), budget=10)
        overall = next(g for g in report.groups if g.group == "overall")
        assert overall.targets == 5
        assert overall.repaired == 3
        assert overall.repair_rate == pytest.approx(3 / 5)

    def test_report_aggregates_recompute_from_rows(self, tmp_path):
        train_db = _corpus(
            tmp_path / "train",
            {"t1": [(1, "WA", FIG3A), (2, "AC", FIG3B)]},
        )
        eval_db = _corpus(
            tmp_path / "eval",
            {
                "e1": [(1, "WA", rename_vars(FIG3A, {"x": "r", "u": "s"}))],
                "e2": [(1, "WA", rename_vars(FIG3A, {"x": "g", "u": "h"})), (2, "AC", rename_vars(FIG3B, {"x": "g", "u": "h"}))],
            },
        )
        report = evaluate(train_db, eval_db, bit_count_suite(), budget=10)
        for g in report.groups:
            rows = [
                r for r in report.rows if g.group == "overall" or r.group == g.group
            ]
            succ = [r for r in rows if r.repaired]
            assert g.targets == len(rows)
            assert g.repaired == len(succ)
            if g.repair_rate is not None:
                assert g.repair_rate == len(succ) / len(rows)
            sizes = [r.relative_repair_size for r in succ if r.relative_repair_size is not None]
            if g.avg_relative_repair_size is not None:
                assert g.avg_relative_repair_size == pytest.approx(sum(sizes) / len(sizes))

    def test_report_serialization_deterministic(self, tmp_path):
        train_db = _corpus(tmp_path / "t", {"t1": [(1, "WA", FIG2A), (2, "AC", FIG2B)]})
        eval_db = _corpus(tmp_path / "e", {"e1": [(1, "WA", FIG2A)]})
        r1 = evaluate(train_db, eval_db, bit_count_suite(), budget=5)
        r2 = evaluate(train_db, eval_db, bit_count_suite(), budget=5)
        assert dump_report(r1) == dump_report(r2)
        table = report_table(r1)
        assert "RepairRate" in table

    def test_parallel_matches_serial(self, tmp_path):
        train_db = _corpus(tmp_path / "t", {"t1": [(1, "WA", FIG2A), (2, "AC", FIG2B)]})
        eval_db = _corpus(
            tmp_path / "e",
            {
                "e1": [(1, "WA", rename_vars(FIG2A, {"c": "q"}))],
                "e2": [(1, "WA", UNFIXABLE)],
            },
        )
        serial = evaluate(train_db, eval_db, bit_count_suite(), budget=6, parallelism=1)
        parallel = evaluate(train_db, eval_db, bit_count_suite(), budget=6, parallelism=4)
        assert dump_report(serial) == dump_report(parallel)


class TestLearnPool:
    def test_pool_from_training_histories(self, tmp_path):
        db = _corpus(
            tmp_path,
            {
                "u1": [(1, "WA", FIG2A), (2, "AC", FIG2B)],
                "u2": [(1, "WA", rename_vars(FIG2A, {"c": "z"})), (2, "AC", rename_vars(FIG2B, {"c": "z"}))],
            },
        )
        pool, pair_count = learn_pool(db)
        assert pair_count == 2
        assert len(pool) == 2  # same fix, different variable names
