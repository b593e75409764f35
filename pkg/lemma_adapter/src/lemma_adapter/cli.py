"""CLI: lemmatize a UTF-8 text file into the token/lemma JSON Lines format."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .adapter import AdapterError, lemmatize_file


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lemmatize",
        description="Convert raw text into the doc/tokens JSON Lines exchange format "
        "consumed by the corpus indexer.",
    )
    parser.add_argument("--in", dest="in_path", required=True, help="UTF-8 text file")
    parser.add_argument("--out", dest="out_path", required=True, help="output JSON Lines file")
    parser.add_argument("--model", default="grc", help="language model id (default: grc)")
    parser.add_argument("--doc-id", default=None, help="document id (default: input file stem)")
    args = parser.parse_args(argv)
    try:
        from .stanza_backend import StanzaPipeline

        pipeline = StanzaPipeline(args.model)
        summary = lemmatize_file(args.in_path, args.out_path, pipeline, doc_id=args.doc_id)
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(
        f"tokens={summary.token_count} unknown_lemmas={summary.unknown_lemma_count} "
        f"model={summary.model_id}@{summary.model_version}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
