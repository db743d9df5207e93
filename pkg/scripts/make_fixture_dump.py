#!/usr/bin/env python3
"""Generate synthetic talk-page dump XML for demos and benchmarking.

Examples:
    python scripts/make_fixture_dump.py --out demo.xml
    python scripts/make_fixture_dump.py --out big.xml --pages 40 --comments 25 --shuffle
"""

import argparse
import sys
from pathlib import Path

from wikitalk.synth import (
    figure_walkthrough_script,
    gold_fixture_suite,
    random_tree_script,
    write_dump,
)
from wikitalk.evalharness import write_gold


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="dump XML output path")
    parser.add_argument(
        "--kind",
        choices=["walkthrough", "suite", "trees"],
        default="walkthrough",
        help="walkthrough: the 5-revision example page; suite: the gold "
        "fixture pages; trees: random reply trees",
    )
    parser.add_argument("--pages", type=int, default=10, help="tree count for --kind trees")
    parser.add_argument("--comments", type=int, default=12, help="comments per tree")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--shuffle", action="store_true", help="shuffle revision document order")
    parser.add_argument("--gold", help="also write gold annotations (jsonl) here")
    args = parser.parse_args(argv)

    if args.kind == "walkthrough":
        scripts = [figure_walkthrough_script()]
    elif args.kind == "suite":
        scripts = gold_fixture_suite()
    else:
        scripts = [
            random_tree_script(args.seed + i, n_comments=args.comments)[0]
            for i in range(args.pages)
        ]
    write_dump(scripts, Path(args.out), shuffle_seed=args.seed if args.shuffle else None)
    total_revisions = sum(len(s.revisions) for s in scripts)
    print(f"wrote {args.out}: {len(scripts)} pages, {total_revisions} revisions", file=sys.stderr)
    if args.gold:
        with open(args.gold, "w", encoding="utf-8") as fh:
            n = sum(write_gold(s.gold, fh) for s in scripts)
        print(f"wrote {args.gold}: {n} gold annotations", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
