"""Wrap a lemmatization pipeline and emit the token/lemma JSON Lines format.

The output contract is the corpus exchange format consumed by the core
toolkit: one document per line,
{"doc_id": "...", "tokens": [{"surface": "...", "lemma": "..."}, ...]},
all strings NFC-normalized, every lemma non-empty. A pipeline is anything
callable text -> [(surface, lemma), ...] with model_id/model_version fields;
the shipped backend wraps stanza, and any pipeline can be injected for tests.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol, Sequence


class AdapterError(Exception):
    pass


class LemmatizerPipeline(Protocol):
    model_id: str
    model_version: str

    def __call__(self, text: str) -> Sequence[tuple[str, str]]: ...


# JSON Schema for one output line (document record) of the exchange format
DOCUMENT_SCHEMA = {
    "type": "object",
    "required": ["doc_id", "tokens"],
    "additionalProperties": False,
    "properties": {
        "doc_id": {"type": "string", "minLength": 1},
        "tokens": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["surface", "lemma"],
                "additionalProperties": False,
                "properties": {
                    "surface": {"type": "string", "minLength": 1},
                    "lemma": {"type": "string", "minLength": 1},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class Summary:
    token_count: int
    unknown_lemma_count: int
    model_id: str
    model_version: str


def _nfc(s: str) -> str:
    return unicodedata.normalize("NFC", s)


def read_utf8(path: Path) -> str:
    raw = path.read_bytes()
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise AdapterError(
            f"{path}: not valid UTF-8 at byte offset {exc.start}: {exc.reason}"
        ) from exc


def lemmatize_text(text: str, pipeline: LemmatizerPipeline) -> tuple[list[dict], int]:
    """Run the pipeline and normalize its output into token records.

    A pipeline may fail to produce a lemma for a token; such tokens fall back
    to their surface form as the lemma and are counted as unknown.
    """
    tokens = []
    unknown = 0
    for surface, lemma in pipeline(text):
        surface = _nfc(surface)
        lemma = _nfc(lemma or "")
        if not surface:
            continue
        if not lemma:
            lemma = surface
            unknown += 1
        tokens.append({"surface": surface, "lemma": lemma})
    return tokens, unknown


def lemmatize_file(
    in_path: str | Path,
    out_path: str | Path,
    pipeline: LemmatizerPipeline,
    doc_id: str | None = None,
) -> Summary:
    """Lemmatize one UTF-8 text file into a one-document JSON Lines file.

    Deterministic for a fixed pipeline: the same input bytes produce the same
    output bytes. A sidecar '<out>.meta.json' records the model identity and
    token counts.
    """
    in_path = Path(in_path)
    out_path = Path(out_path)
    text = read_utf8(in_path)
    tokens, unknown = lemmatize_text(text, pipeline)
    record = {"doc_id": doc_id or in_path.stem, "tokens": tokens}
    out_path.write_text(
        json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )
    summary = Summary(
        token_count=len(tokens),
        unknown_lemma_count=unknown,
        model_id=pipeline.model_id,
        model_version=pipeline.model_version,
    )
    meta = {
        "doc_id": record["doc_id"],
        "model_id": summary.model_id,
        "model_version": summary.model_version,
        "token_count": summary.token_count,
        "unknown_lemma_count": summary.unknown_lemma_count,
    }
    Path(str(out_path) + ".meta.json").write_text(
        json.dumps(meta, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return summary
