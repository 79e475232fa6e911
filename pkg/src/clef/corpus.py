"""Submission corpus handling and the evaluation protocol.

Corpus layout on disk::

    <root>/<problem_id>/users/<user_id>/<seq>_<VERDICT>.c
    <root>/<problem_id>/tests/           # judge suite layout

VERDICT is one of AC, WA, CE, RE, TLE, MLE, OT as labeled by the original
platform; those recorded labels drive pairing and grouping, while the local
judge only validates repair candidates.  Evaluation splits users 80/20,
learns a pattern pool from the training users' (incorrect, correct) pairs and
reports repair rates, relative repair sizes and dissimilarity per user group.
"""

from __future__ import annotations

import json
import random
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .distance import Num, ted, unit_cost_model
from .judge import CompilerConfig, Outcome, OUTCOME_BY_CODE, TestSuite
from .nodes import Ast, node_count
from .parser import ParseError, parse
from .patterns import MergeTreePool, learn_transformations, pool_merge
from .repair import Repaired, repair


class IngestError(Exception):
    pass


@dataclass(frozen=True)
class SubmissionRecord:
    user_id: str
    problem_id: str
    seq: int  # monotone order key within a user's history
    source: str
    recorded_outcome: Outcome
    ast: Optional[Ast] = None
    parse_error: Optional[str] = None

    @property
    def parses(self) -> bool:
        return self.ast is not None


@dataclass
class SubmissionDb:
    problem_id: str
    users: dict[str, list[SubmissionRecord]] = field(default_factory=dict)
    tests_dir: Optional[Path] = None

    def user_ids(self) -> list[str]:
        return sorted(self.users)


@dataclass(frozen=True)
class Pair:
    user_id: str
    incorrect: SubmissionRecord
    correct: SubmissionRecord


_FILENAME_RE = re.compile(r"^(\d+)_([A-Z]+)\.c$")


def ingest(root_dir: str | Path, problem_id: str) -> SubmissionDb:
    """Load one problem's submission histories from the corpus layout."""
    root = Path(root_dir) / problem_id
    users_dir = root / "users"
    if not users_dir.is_dir():
        raise IngestError(f"missing users directory {users_dir}")
    db = SubmissionDb(problem_id=problem_id)
    tests = root / "tests"
    db.tests_dir = tests if tests.is_dir() else None
    for user_dir in sorted(users_dir.iterdir()):
        if not user_dir.is_dir():
            continue
        records: list[SubmissionRecord] = []
        seen_seq: set[int] = set()
        for f in sorted(user_dir.iterdir()):
            m = _FILENAME_RE.match(f.name)
            if not m:
                raise IngestError(f"bad submission filename {f}")
            seq = int(m.group(1))
            code = m.group(2)
            if code not in OUTCOME_BY_CODE:
                raise IngestError(f"unknown verdict code {code!r} in {f}")
            if seq in seen_seq:
                raise IngestError(f"duplicate submission order key {seq} in {f}")
            seen_seq.add(seq)
            source = f.read_text(encoding="utf-8")
            ast = None
            err = None
            try:
                ast = parse(source)
            except ParseError as exc:
                err = str(exc)
            records.append(
                SubmissionRecord(
                    user_dir.name, problem_id, seq, source,
                    OUTCOME_BY_CODE[code], ast, err,
                )
            )
        records.sort(key=lambda r: r.seq)
        db.users[user_dir.name] = records
    return db


def make_pairs(db: SubmissionDb) -> list[Pair]:
    """All (incorrect, correct) combinations per user.

    Users who solved the problem on their first attempt contribute nothing;
    submissions that fail to parse are discarded.
    """
    pairs: list[Pair] = []
    for user in db.user_ids():
        records = db.users[user]
        if not records:
            continue
        if records[0].recorded_outcome is Outcome.ACCEPTED:
            continue
        usable = [r for r in records if r.parses]
        incorrect = [r for r in usable if r.recorded_outcome is not Outcome.ACCEPTED]
        correct = [r for r in usable if r.recorded_outcome is Outcome.ACCEPTED]
        for i in incorrect:
            for c in correct:
                pairs.append(Pair(user, i, c))
    return pairs


def split_users(
    db: SubmissionDb, ratio: float = 0.8, seed: int = 0
) -> tuple[SubmissionDb, SubmissionDb]:
    """User-level random partition; floor(n*ratio) users land in training."""
    if not 0 < ratio < 1:
        raise ValueError("ratio must be in (0, 1)")
    users = db.user_ids()
    rng = random.Random(seed)
    shuffled = list(users)
    rng.shuffle(shuffled)
    n_train = int(len(users) * ratio)
    train_ids = set(shuffled[:n_train])
    train = SubmissionDb(db.problem_id, tests_dir=db.tests_dir)
    evaluation = SubmissionDb(db.problem_id, tests_dir=db.tests_dir)
    for u in users:
        (train if u in train_ids else evaluation).users[u] = db.users[u]
    return train, evaluation


def group_users(eval_db: SubmissionDb) -> tuple[list[str], list[str]]:
    """Group One: never produced an Accepted record; Group Two: eventually did."""
    one: list[str] = []
    two: list[str] = []
    for user in eval_db.user_ids():
        records = eval_db.users[user]
        if not records or records[0].recorded_outcome is Outcome.ACCEPTED:
            continue  # first-attempt solvers are cleaned out upstream
        if any(r.recorded_outcome is Outcome.ACCEPTED for r in records):
            two.append(user)
        else:
            one.append(user)
    return one, two


# ---------------------------------------------------------------------------
# Metrics


def dissimilarity(target: Ast, correct_set: list[Ast]) -> float:
    """Min unit-cost distance to any correct program, over the target's size."""
    if not correct_set:
        raise ValueError("dissimilarity needs a non-empty set of correct programs")
    best = min(ted(target.root, c.root, unit_cost_model()).distance for c in correct_set)
    return best / node_count(target)


def relative_repair_size(repaired: Ast, target: Ast) -> float:
    return ted(repaired.root, target.root, unit_cost_model()).distance / node_count(target)


def is_high_quality(repaired: Ast, target: Ast, user_fix: Ast) -> bool:
    """Strictly closer to the target than the user's own fix is."""
    mine = ted(repaired.root, target.root, unit_cost_model()).distance
    theirs = ted(user_fix.root, target.root, unit_cost_model()).distance
    return mine < theirs


# ---------------------------------------------------------------------------
# Evaluation


@dataclass(frozen=True)
class TargetRow:
    user_id: str
    seq: int
    group: str  # "one" | "two"
    recorded_outcome: str
    repaired: bool
    candidates_tried: int
    repair_cost: Optional[Num]
    relative_repair_size: Optional[float]
    dissimilarity: Optional[float]
    high_quality: Optional[bool]


@dataclass(frozen=True)
class GroupStats:
    group: str
    targets: int
    repaired: int
    repair_rate: Optional[float]
    high_quality_rate: Optional[float]
    avg_relative_repair_size: Optional[float]
    avg_dissimilarity: Optional[float]
    avg_dissimilarity_successes: Optional[float]
    avg_dissimilarity_failures: Optional[float]


@dataclass(frozen=True)
class EvalReport:
    problem_id: str
    seed: int
    ratio: float
    train_users: list[str]
    eval_users: list[str]
    pair_count: int
    pool_size: int
    rows: list[TargetRow]
    groups: list[GroupStats]
    notes: list[str]


def _mean(values: list[float]) -> Optional[float]:
    return sum(values) / len(values) if values else None


def _group_stats(name: str, rows: list[TargetRow], with_quality: bool) -> GroupStats:
    succ = [r for r in rows if r.repaired]
    fail = [r for r in rows if not r.repaired]
    quality_rows = [r for r in succ if r.high_quality is not None] if with_quality else []
    return GroupStats(
        group=name,
        targets=len(rows),
        repaired=len(succ),
        repair_rate=(len(succ) / len(rows)) if rows else None,
        high_quality_rate=(
            sum(1 for r in quality_rows if r.high_quality) / len(quality_rows)
            if quality_rows
            else None
        ),
        avg_relative_repair_size=_mean(
            [r.relative_repair_size for r in succ if r.relative_repair_size is not None]
        ),
        avg_dissimilarity=_mean([r.dissimilarity for r in rows if r.dissimilarity is not None]),
        avg_dissimilarity_successes=_mean(
            [r.dissimilarity for r in succ if r.dissimilarity is not None]
        ),
        avg_dissimilarity_failures=_mean(
            [r.dissimilarity for r in fail if r.dissimilarity is not None]
        ),
    )


def learn_pool(train_db: SubmissionDb, cf_weight: Num = 10) -> tuple[MergeTreePool, int]:
    """Learn and aggregate patterns from every training pair."""
    pairs = make_pairs(train_db)
    pools = [
        learn_transformations(
            p.incorrect.ast,
            p.correct.ast,
            cf_weight,
            origin=(f"{p.user_id}:{p.incorrect.seq}->{p.correct.seq}", train_db.problem_id),
        )
        for p in pairs
    ]
    merged = pool_merge(pools) if pools else MergeTreePool(problem_id=train_db.problem_id)
    return merged, len(pairs)


def evaluate(
    train_db: SubmissionDb,
    eval_db: SubmissionDb,
    suite: TestSuite,
    budget: int = 1000,
    cf_weight: Num = 10,
    cc: Optional[CompilerConfig] = None,
    parallelism: int = 1,
    seed: int = 0,
    ratio: float = 0.8,
) -> EvalReport:
    """Learn from the training users, repair every incorrect eval submission.

    Repairs run independently per target (optionally in parallel); rows are
    aggregated in a fixed order so the report is identical at any parallelism
    degree.
    """
    if train_db.problem_id != eval_db.problem_id:
        raise ValueError("train and eval sets must come from the same problem")
    notes: list[str] = []
    pool, pair_count = learn_pool(train_db, cf_weight)
    correct_set = [
        r.ast
        for u in train_db.user_ids()
        for r in train_db.users[u]
        if r.recorded_outcome is Outcome.ACCEPTED and r.parses
    ]
    if not correct_set:
        notes.append("training set has no parseable correct programs; dissimilarity omitted")

    group_one, group_two = group_users(eval_db)
    group_of = {u: "one" for u in group_one} | {u: "two" for u in group_two}

    targets: list[tuple[str, SubmissionRecord]] = []
    for user in eval_db.user_ids():
        if user not in group_of:
            continue
        for r in eval_db.users[user]:
            if r.recorded_outcome is Outcome.ACCEPTED:
                continue
            if not r.parses:
                notes.append(f"skipped unparsable submission {user}/{r.seq}")
                continue
            targets.append((user, r))

    user_fix: dict[str, Optional[Ast]] = {}
    for user in group_two:
        fix = next(
            (
                r.ast
                for r in eval_db.users[user]
                if r.recorded_outcome is Outcome.ACCEPTED and r.parses
            ),
            None,
        )
        user_fix[user] = fix

    def run_one(item: tuple[str, SubmissionRecord]) -> TargetRow:
        user, record = item
        result = repair(record.ast, pool, suite, budget=budget, cc=cc)
        repaired_ok = isinstance(result, Repaired)
        rel = None
        quality = None
        cost = None
        tried = 0
        if repaired_ok:
            cost = result.repair_cost
            rel = relative_repair_size(result.ast, record.ast)
            fix = user_fix.get(user)
            if fix is not None:
                quality = is_high_quality(result.ast, record.ast, fix)
        else:
            tried = result.candidates_tried
        dis = dissimilarity(record.ast, correct_set) if correct_set else None
        return TargetRow(
            user_id=user,
            seq=record.seq,
            group=group_of[user],
            recorded_outcome=record.recorded_outcome.code,
            repaired=repaired_ok,
            candidates_tried=tried,
            repair_cost=cost,
            relative_repair_size=rel,
            dissimilarity=dis,
            high_quality=quality,
        )

    if parallelism > 1 and len(targets) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool_exec:
            rows = list(pool_exec.map(run_one, targets))
    else:
        rows = [run_one(t) for t in targets]

    groups: list[GroupStats] = []
    one_rows = [r for r in rows if r.group == "one"]
    two_rows = [r for r in rows if r.group == "two"]
    if one_rows:
        groups.append(_group_stats("one", one_rows, with_quality=False))
    else:
        notes.append("group one empty; omitted")
    if two_rows:
        groups.append(_group_stats("two", two_rows, with_quality=True))
    else:
        notes.append("group two empty; omitted")
    groups.append(_group_stats("overall", rows, with_quality=True))

    return EvalReport(
        problem_id=train_db.problem_id,
        seed=seed,
        ratio=ratio,
        train_users=train_db.user_ids(),
        eval_users=eval_db.user_ids(),
        pair_count=pair_count,
        pool_size=len(pool),
        rows=rows,
        groups=groups,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# Report output


def report_to_json(report: EvalReport) -> dict:
    return {
        "problem_id": report.problem_id,
        "seed": report.seed,
        "ratio": report.ratio,
        "train_users": report.train_users,
        "eval_users": report.eval_users,
        "pair_count": report.pair_count,
        "pool_size": report.pool_size,
        "rows": [vars(r).copy() for r in report.rows],
        "groups": [vars(g).copy() for g in report.groups],
        "notes": report.notes,
    }


def dump_report(report: EvalReport) -> str:
    return json.dumps(report_to_json(report), indent=2, sort_keys=True) + "\n"


def report_table(report: EvalReport) -> str:
    """Plain-text table with one row per group."""
    headers = [
        "Group", "Targets", "Repaired", "RepairRate", "HighQuality",
        "AvgRelRepairSize", "AvgDissim", "AvgDissimSucc", "AvgDissimFail",
    ]

    def fmt(v: Optional[float], pct: bool = False) -> str:
        if v is None:
            return "-"
        return f"{100 * v:.1f}%" if pct else f"{v:.3f}"

    rows = [
        [
            g.group,
            str(g.targets),
            str(g.repaired),
            fmt(g.repair_rate, pct=True),
            fmt(g.high_quality_rate, pct=True),
            fmt(g.avg_relative_repair_size),
            fmt(g.avg_dissimilarity),
            fmt(g.avg_dissimilarity_successes),
            fmt(g.avg_dissimilarity_failures),
        ]
        for g in report.groups
    ]
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * widths[i] for i in range(len(headers))),
    ]
    lines.extend("  ".join(r[i].ljust(widths[i]) for i in range(len(headers))) for r in rows)
    return "\n".join(lines) + "\n"
