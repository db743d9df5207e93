"""Command-line interface.

Subcommands::

    wikitalk reconstruct --input dump.xml --output corpus.jsonl [...]
    wikitalk eval sample --corpus F --per-type N --seed S
    wikitalk eval score --corpus F --gold G --report R
    wikitalk analytics score --corpus F --output scored.jsonl [--scorer stub]
    wikitalk analytics eer --labeled labeled.jsonl
    wikitalk analytics deletion-rate --scored F --horizons 1h,1d,7d --subset toxic

Every flag can also be set through an environment variable: the flag name
upper-snake-cased with a WIKITALK_ prefix (e.g. WIKITALK_WORKERS=8).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from wikitalk import analytics, corpus, evalharness
from wikitalk.extsort import DEFAULT_MAX_IN_MEMORY, DEFAULT_STAGE_SPAN_YEARS
from wikitalk.pipeline import PipelineConfig, run_pipeline_cli


def _env(flag: str, default=None):
    return os.environ.get("WIKITALK_" + flag.replace("-", "_").upper(), default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wikitalk")
    sub = parser.add_subparsers(dest="command", required=True)

    rec = sub.add_parser("reconstruct", help="rebuild a conversation corpus from a dump")
    rec.add_argument("--input", required=_env("input") is None, default=_env("input"))
    rec.add_argument("--output", required=_env("output") is None, default=_env("output"))
    rec.add_argument("--workers", type=int, default=int(_env("workers", 1)))
    rec.add_argument(
        "--max-mem-revisions",
        type=int,
        default=int(_env("max-mem-revisions", DEFAULT_MAX_IN_MEMORY)),
    )
    rec.add_argument("--spill-dir", default=_env("spill-dir"))
    rec.add_argument(
        "--stage-span-years",
        type=int,
        default=int(_env("stage-span-years", DEFAULT_STAGE_SPAN_YEARS)),
    )
    rec.add_argument("--stats", default=_env("stats"))

    ev = sub.add_parser("eval", help="reconstruction-quality evaluation")
    ev_sub = ev.add_subparsers(dest="eval_command", required=True)
    ev_sample = ev_sub.add_parser("sample", help="draw a review sample per action type")
    ev_sample.add_argument("--corpus", required=True)
    ev_sample.add_argument("--per-type", type=int, default=int(_env("per-type", 100)))
    ev_sample.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    ev_sample.add_argument("--output", default=_env("output"))
    ev_score = ev_sub.add_parser("score", help="score a corpus against gold annotations")
    ev_score.add_argument("--corpus", required=True)
    ev_score.add_argument("--gold", required=True)
    ev_score.add_argument("--report", required=True)

    an = sub.add_parser("analytics", help="moderation analytics over a corpus")
    an_sub = an.add_subparsers(dest="analytics_command", required=True)
    an_score = an_sub.add_parser("score", help="attach toxicity scores to comments")
    an_score.add_argument("--corpus", required=True)
    an_score.add_argument("--output", required=True)
    an_score.add_argument("--scorer", choices=["stub", "http"], default=_env("scorer", "stub"))
    an_score.add_argument("--endpoint", default=_env("endpoint"))
    an_score.add_argument("--api-key", default=_env("api-key"))
    an_score.add_argument("--rate-limit", type=float, default=float(_env("rate-limit", 10.0)))
    an_score.add_argument("--timeout", type=float, default=float(_env("timeout", 10.0)))
    an_score.add_argument("--max-attempts", type=int, default=int(_env("max-attempts", 3)))
    an_eer = an_sub.add_parser("eer", help="equal-error-rate threshold from labeled scores")
    an_eer.add_argument("--labeled", required=True)
    an_rate = an_sub.add_parser("deletion-rate", help="deletion rate per time horizon")
    an_rate.add_argument("--scored", required=True)
    an_rate.add_argument("--horizons", default=_env("horizons", ",".join(analytics.DEFAULT_HORIZONS)))
    an_rate.add_argument("--subset", choices=["all", "toxic", "severe"], default="all")
    an_rate.add_argument("--toxicity-threshold", type=float, default=None)
    an_rate.add_argument("--severe-threshold", type=float, default=None)
    an_rate.add_argument("--output", default=None)
    return parser


def _cmd_reconstruct(args) -> int:
    config = PipelineConfig(
        input_path=Path(args.input),
        output_path=Path(args.output),
        workers=args.workers,
        max_in_memory_revisions=args.max_mem_revisions,
        spill_dir=Path(args.spill_dir) if args.spill_dir else None,
        stage_span_years=args.stage_span_years,
        stats_path=Path(args.stats) if args.stats else None,
    )
    return run_pipeline_cli(config)


def _cmd_eval_sample(args) -> int:
    from collections import Counter

    with open(args.corpus, encoding="utf-8") as fh:
        actions = list(corpus.read_actions(fh))
    population = Counter(a.type.value for a in actions)
    for name, count in sorted(population.items()):
        if count < args.per_type:
            print(
                f"note: only {count} {name} actions available; sampling all of them",
                file=sys.stderr,
            )
    sampled = evalharness.sample_for_review(actions, args.per_type, args.seed)
    out = sys.stdout
    close = False
    if args.output:
        out = open(args.output, "w", encoding="utf-8")
        close = True
    try:
        for action in sampled:
            out.write(corpus.serialize_action(action) + "\n")
    finally:
        if close:
            out.close()
    print(f"sampled {len(sampled)} actions", file=sys.stderr)
    return 0


def _cmd_eval_score(args) -> int:
    with open(args.corpus, encoding="utf-8") as fh:
        actions = list(corpus.read_actions(fh))
    with open(args.gold, encoding="utf-8") as fh:
        gold = evalharness.read_gold(fh)
    table = evalharness.score_against_gold(actions, gold)
    with open(args.report, "w", encoding="utf-8") as fh:
        json.dump(table.to_records(), fh, indent=2)
        fh.write("\n")
    print(table.render())
    return 0


def _cmd_analytics_score(args) -> int:
    if args.scorer == "http":
        if not args.endpoint:
            print("error: --endpoint required for the http scorer", file=sys.stderr)
            return 2
        scorer = analytics.HttpScorer(
            endpoint=args.endpoint,
            api_key=args.api_key,
            rate_limit=args.rate_limit,
            timeout=args.timeout,
            max_attempts=args.max_attempts,
        )
    else:
        scorer = analytics.StubScorer()
    with open(args.corpus, encoding="utf-8") as fh:
        actions = list(corpus.read_actions(fh))
    tally = analytics.ScoringTally()
    scored = analytics.score_comments(actions, scorer, tally)
    by_id = {c.action_id: c for c in scored}
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(corpus.SCORED_SCHEMA_HEADER + "\n")
        for action in actions:
            comment = by_id.get(action.action_id)
            extra = {
                "toxicity": comment.toxicity if comment else None,
                "severe_toxicity": comment.severe_toxicity if comment else None,
            }
            fh.write(corpus.serialize_action(action, extra) + "\n")
    print(f"scored {tally.scored} comments ({tally.failed} failures)", file=sys.stderr)
    return 0


def _cmd_analytics_eer(args) -> int:
    scores: list[float] = []
    labels: list[bool] = []
    with open(args.labeled, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            record = json.loads(line)
            scores.append(float(record["score"]))
            labels.append(bool(record["label"]))
    threshold = analytics.equal_error_threshold(scores, labels)
    print(json.dumps({"threshold": threshold, "n": len(scores)}))
    return 0


def _cmd_analytics_deletion_rate(args) -> int:
    horizons = [analytics.parse_horizon(h) for h in args.horizons.split(",") if h.strip()]
    with open(args.scored, encoding="utf-8") as fh:
        actions = []
        extras = {}
        for record in corpus.read_records(fh):
            action = corpus.record_to_action(record)
            actions.append(action)
            extras[action.action_id] = (
                record.get("toxicity"),
                record.get("severe_toxicity"),
            )

    _, scored = analytics.comments_with_deletions(actions)
    for comment in scored:
        toxicity, severe = extras.get(comment.action_id, (None, None))
        comment.toxicity = toxicity
        comment.severe_toxicity = severe
    rates = analytics.deletion_rate(
        scored,
        horizons,
        subset=args.subset,
        toxicity_threshold=args.toxicity_threshold,
        severe_threshold=args.severe_threshold,
    )
    rows = [
        {"horizon": label.strip(), "rate": rate}
        for label, rate in zip(args.horizons.split(","), rates)
    ]
    payload = json.dumps({"subset": args.subset, "rates": rows}, indent=2)
    if args.output:
        Path(args.output).write_text(payload + "\n", encoding="utf-8")
    print(payload)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "reconstruct":
        return _cmd_reconstruct(args)
    if args.command == "eval":
        if args.eval_command == "sample":
            return _cmd_eval_sample(args)
        return _cmd_eval_score(args)
    if args.analytics_command == "score":
        return _cmd_analytics_score(args)
    if args.analytics_command == "eer":
        return _cmd_analytics_eer(args)
    return _cmd_analytics_deletion_rate(args)


if __name__ == "__main__":
    sys.exit(main())
