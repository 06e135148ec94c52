"""Command line entry point: records file in, word-importance file out."""

import argparse
import sys

from .adapter import OcclusionAdapter, load_sentences, write_importance
from .oracles import build_oracle


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wis-adapter",
        description=(
            "Score every token of a sentence records file by leave-one-out "
            "occlusion and write a word-importance JSONL file."
        ),
    )
    parser.add_argument("--records", required=True, help="Input records file (JSONL).")
    parser.add_argument("--output", required=True, help="Output word-importance file (JSONL).")
    parser.add_argument(
        "--oracle",
        default="lexicon",
        help=(
            "Scoring oracle: token-count, constant[:VALUE], keyword:WORD, "
            "lexicon, or surface (keyword oracle built per record from its "
            "own lengthened token). Default: lexicon."
        ),
    )
    parser.add_argument("--model-id", default=None, help="Model id to stamp on every row; defaults to the oracle spec.")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    model_id = args.model_id or args.oracle
    try:
        if args.oracle == "surface":
            adapter = OcclusionAdapter(oracle=None, model_id=model_id, per_surface=True)
        else:
            adapter = OcclusionAdapter(oracle=build_oracle(args.oracle), model_id=model_id)
        items, report = load_sentences(args.records)
    except (OSError, ValueError) as exc:
        print(f"wis-adapter: {exc}", file=sys.stderr)
        return 1
    rows = adapter.run(items)
    written = write_importance(args.output, rows)
    print(
        f"wis-adapter: {written} rows ({report.skipped} records skipped) -> {args.output}",
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
