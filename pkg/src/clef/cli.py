"""Command-line entry point: learn patterns, repair a target, judge, evaluate.

Exit codes: 0 success, 1 domain failure (no repair found, program not
accepted, bad input data), 2 usage error, 3 infrastructure fault (missing
compiler, broken sandbox).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .config import Config, load_config
from .judge import JudgeInfrastructureError, Outcome, judge, load_suite
from .parser import ParseError, parse
from .patterns import load_pool, save_pool
from .printer import to_source
from .repair import Repaired, repair

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_INFRA = 3


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="clef", description=__doc__)
    top.add_argument("--config", help="path to a JSON config file")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn a pattern pool from a submission corpus")
    p.add_argument("--db", required=True, help="corpus root directory")
    p.add_argument("--problem", required=True, help="problem id inside the corpus")
    p.add_argument("--out", required=True, help="output pool JSON path")
    p.add_argument("--cf-weight", type=float, default=None)

    p = sub.add_parser("repair", help="repair one incorrect program")
    p.add_argument("--pool", required=True, help="pattern pool JSON")
    p.add_argument("--target", required=True, help="incorrect .c file")
    p.add_argument("--tests", required=True, help="test suite directory")
    p.add_argument("--budget", type=int, default=None)

    p = sub.add_parser("judge", help="judge a program against a test suite")
    p.add_argument("--tests", required=True, help="test suite directory")
    p.add_argument("file", help="program to judge")

    p = sub.add_parser("evaluate", help="run the split/learn/repair protocol")
    p.add_argument("--db", required=True)
    p.add_argument("--problem", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--ratio", type=float, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--parallelism", type=int, default=None)
    p.add_argument("--out-dir", default=".")
    return top


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "learn":
            return _cmd_learn(args, cfg)
        if args.command == "repair":
            return _cmd_repair(args, cfg)
        if args.command == "judge":
            return _cmd_judge(args, cfg)
        return _cmd_evaluate(args, cfg)
    except JudgeInfrastructureError as exc:
        print(f"infrastructure fault: {exc}", file=sys.stderr)
        return EXIT_INFRA
    except (corpus_mod.IngestError, FileNotFoundError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def _cmd_learn(args, cfg: Config) -> int:
    cf_weight = args.cf_weight if args.cf_weight is not None else cfg.cf_weight
    db = corpus_mod.ingest(args.db, args.problem)
    pool, pair_count = corpus_mod.learn_pool(db, cf_weight)
    save_pool(pool, args.out)
    print(f"pairs: {pair_count}")
    print(f"patterns: {len(pool)}")
    return EXIT_OK


def _cmd_repair(args, cfg: Config) -> int:
    budget = args.budget if args.budget is not None else cfg.budget
    pool = load_pool(args.pool)
    target_path = Path(args.target)
    try:
        target = parse(target_path.read_text(encoding="utf-8"))
    except ParseError as exc:
        print(f"error: target does not parse: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    suite = load_suite(args.tests)
    result = repair(
        target,
        pool,
        suite,
        budget=budget,
        cc=cfg.compiler(),
        var_align_cap=cfg.var_align_cap,
        combo_arity_cap=cfg.combo_arity_cap,
    )
    if isinstance(result, Repaired):
        out_path = target_path.with_suffix("").with_name(
            target_path.with_suffix("").name + ".repaired.c"
        )
        out_path.write_text(to_source(result.ast), encoding="utf-8")
        if result.applied:
            for site in result.applied:
                print(
                    f"applied pattern #{site.pattern_index}"
                    f" (origin {site.pattern.origin[0]}) at path {list(site.target_path)}"
                )
        else:
            print("target already accepted; no pattern applied")
        print(f"repair distance: {result.repair_cost}")
        print(f"wrote {out_path}")
        return EXIT_OK
    best = result.best_verdict.outcome.value if result.best_verdict else "none"
    print(f"no repair found: tried {result.candidates_tried} candidates")
    print(f"best verdict: {best}")
    return EXIT_DOMAIN


def _cmd_judge(args, cfg: Config) -> int:
    source = Path(args.file).read_text(encoding="utf-8")
    suite = load_suite(args.tests)
    verdict = judge(source, suite, cfg.compiler())
    print(f"outcome: {verdict.outcome.value}")
    if verdict.first_failed_test is not None:
        print(f"first failed test: {verdict.first_failed_test}")
    for m in verdict.measured:
        print(f"test {m.test_id}: {m.status} time={m.time_ms}ms memory={m.memory_kb}kB")
    if verdict.outcome is Outcome.COMPILE_TIME_ERROR and verdict.detail:
        print(verdict.detail.rstrip())
    return EXIT_OK if verdict.outcome is Outcome.ACCEPTED else EXIT_DOMAIN


def _cmd_evaluate(args, cfg: Config) -> int:
    ratio = args.ratio if args.ratio is not None else cfg.split_ratio
    budget = args.budget if args.budget is not None else cfg.budget
    parallelism = args.parallelism if args.parallelism is not None else cfg.parallelism
    db = corpus_mod.ingest(args.db, args.problem)
    if db.tests_dir is None:
        print(f"error: corpus has no tests directory for {args.problem}", file=sys.stderr)
        return EXIT_DOMAIN
    suite = load_suite(db.tests_dir)
    train_db, eval_db = corpus_mod.split_users(db, ratio=ratio, seed=args.seed)
    report = corpus_mod.evaluate(
        train_db,
        eval_db,
        suite,
        budget=budget,
        cf_weight=cfg.cf_weight,
        cc=cfg.compiler(),
        parallelism=parallelism,
        seed=args.seed,
        ratio=ratio,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / f"report_{args.problem}.json"
    table_path = out_dir / f"report_{args.problem}.txt"
    json_path.write_text(corpus_mod.dump_report(report), encoding="utf-8")
    table = corpus_mod.report_table(report)
    table_path.write_text(table, encoding="utf-8")
    print(table, end="")
    print(f"wrote {json_path} and {table_path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
