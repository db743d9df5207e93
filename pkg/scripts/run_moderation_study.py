#!/usr/bin/env python3
"""End-to-end moderation study on a synthetic corpus.

Builds a dump, reconstructs the conversation corpus, scores comments with
the deterministic stub scorer, picks a toxicity threshold by equal error
rate against synthetic labels, and prints deletion-rate curves for the
full population and the toxic subset.

Usage:
    python scripts/run_moderation_study.py --workdir /tmp/study
"""

import argparse
import json
import random
import sys
from pathlib import Path

from wikitalk.analytics import (
    StubScorer,
    deletion_rate,
    equal_error_threshold,
    parse_horizon,
    score_comments,
)
from wikitalk.corpus import read_actions
from wikitalk.pipeline import PipelineConfig, run_pipeline
from wikitalk.synth import gold_fixture_suite, random_tree_script, write_dump


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", required=True)
    parser.add_argument("--trees", type=int, default=30)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--horizons", default="1h,6h,1d,7d,30d,1y")
    args = parser.parse_args(argv)

    workdir = Path(args.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    scripts = gold_fixture_suite() + [
        random_tree_script(args.seed + i)[0] for i in range(args.trees)
    ]
    dump = write_dump(scripts, workdir / "dump.xml", shuffle_seed=args.seed)
    corpus_path = workdir / "corpus.jsonl"
    report = run_pipeline(PipelineConfig(input_path=dump, output_path=corpus_path))
    print(f"reconstructed {report.actions_written} actions from {report.pages} pages",
          file=sys.stderr)

    with open(corpus_path, encoding="utf-8") as fh:
        actions = list(read_actions(fh))
    scored = score_comments(actions, StubScorer())

    # synthetic calibration labels: noisy thresholding of the stub scores
    rng = random.Random(args.seed)
    calibration = [(c.toxicity, c.toxicity + rng.gauss(0, 0.15) > 0.6) for c in scored]
    if len({label for _, label in calibration}) < 2:
        print("calibration degenerate; add more pages", file=sys.stderr)
        return 1
    threshold = equal_error_threshold(*zip(*calibration))
    print(f"equal-error-rate threshold: {threshold:.3f}", file=sys.stderr)

    horizons = [parse_horizon(h) for h in args.horizons.split(",")]
    table = {}
    for subset in ("all", "toxic"):
        rates = deletion_rate(
            scored, horizons, subset=subset, toxicity_threshold=threshold
        )
        table[subset] = {
            label: rate for label, rate in zip(args.horizons.split(","), rates)
        }
    print(json.dumps({"threshold": threshold, "deletion_rates": table}, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
