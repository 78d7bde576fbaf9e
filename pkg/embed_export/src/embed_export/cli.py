"""CLI: embed-export --dataset <jsonl> --model <name> --layer 2 --pool mean
--out <tsv> [--stub --seed N --dim D]"""

from __future__ import annotations

import argparse
import sys

from .export import ExportConfig, POOLING_MODES, export


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="embed-export")
    parser.add_argument("--dataset", required=True, help="phrase dataset JSONL")
    parser.add_argument("--out", required=True, help="embedding TSV to write")
    parser.add_argument("--model", default="bert-base-uncased")
    parser.add_argument("--layer", type=int, default=2)
    parser.add_argument("--pool", default="mean", choices=POOLING_MODES)
    parser.add_argument("--stub", action="store_true",
                        help="seeded hash projection instead of a real model")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--dim", type=int, default=16, help="stub vector width")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = ExportConfig(
        dataset=args.dataset,
        out=args.out,
        model=args.model,
        layer=args.layer,
        pooling=args.pool,
        stub=args.stub,
        seed=args.seed,
        dim=args.dim,
    )
    try:
        count = export(cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # model loading/runtime failures
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {count} embeddings to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
