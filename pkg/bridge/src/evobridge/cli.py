"""Bridge CLI: embed texts with a pretrained encoder, sample SQuAD questions.

Exit codes: 0 ok, 1 usage, 2 data/model error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .embed import embed_texts
from .encoders import DEFAULT_MODEL, load_encoder
from .errors import BridgeError
from .squad import fetch_squad_subset


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def cmd_embed(args: argparse.Namespace) -> int:
    encoder = load_encoder(args.model)
    summary = embed_texts(
        args.input,
        args.out,
        encoder,
        batch_size=args.batch_size,
        manifest_path=args.manifest,
    )
    print(
        f"embedded {summary.count} records (dim {summary.dim}, model {summary.model_id})"
        + (f", skipped {len(summary.skipped)}" if summary.skipped else "")
    )
    return 0


def cmd_fetch_squad(args: argparse.Namespace) -> int:
    written = fetch_squad_subset(args.count, args.out, args.seed, args.dataset_file)
    print(f"wrote {written} question records -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evoretrieve-bridge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_embed = sub.add_parser("embed", help="embed a texts JSONL into a corpus JSONL")
    p_embed.add_argument("--input", required=True, help="texts JSONL ({id, text} per line)")
    p_embed.add_argument("--out", required=True, help="corpus JSONL output path")
    p_embed.add_argument("--model", default=DEFAULT_MODEL, help="encoder model identifier")
    p_embed.add_argument("--batch-size", type=int, default=64)
    p_embed.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")
    p_embed.set_defaults(func=cmd_embed)

    p_squad = sub.add_parser("fetch-squad", help="sample question records from a SQuAD dump")
    p_squad.add_argument("--count", type=int, required=True)
    p_squad.add_argument("--out", required=True)
    p_squad.add_argument("--seed", type=int, default=0)
    p_squad.add_argument("--dataset-file", required=True, help="local SQuAD JSON path")
    p_squad.set_defaults(func=cmd_fetch_squad)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except BridgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
