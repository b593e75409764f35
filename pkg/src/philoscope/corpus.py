"""Lemma-frequency index over a lemmatized corpus, with Zipf-scale queries.

A corpus arrives as a stream of documents whose tokens carry (surface, lemma)
pairs. The index counts lemma occurrences per token and answers frequency and
Zipf-scaled frequency lookups. Absent lemmas have frequency 0 and Zipf 0.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import DataError
from .util import nfc

# Zipf scale constant: frequency per ZIPF_SCALE tokens, log10.
# Isolated here so recalibrating the scale is a one-line change.
ZIPF_SCALE = 1_000_000_000

TokenPair = tuple[str, str]  # (surface, lemma)


@dataclass(frozen=True)
class LemmaStream:
    """An ordered list of (doc_id, tokens) documents with NFC-normalized lemmas."""

    documents: tuple[tuple[str, tuple[TokenPair, ...]], ...]

    @classmethod
    def from_documents(
        cls, documents: Iterable[tuple[str, Sequence[TokenPair]]]
    ) -> "LemmaStream":
        """Normalize surfaces/lemmas to NFC and validate stream invariants."""
        seen: set[str] = set()
        normalized = []
        for doc_id, tokens in documents:
            if doc_id in seen:
                raise DataError(f"duplicate doc_id in stream: {doc_id!r}")
            seen.add(doc_id)
            out = []
            for i, (surface, lemma) in enumerate(tokens):
                lemma_n = nfc(lemma)
                if not lemma_n:
                    raise DataError(f"empty lemma at doc {doc_id!r}, token {i + 1}")
                out.append((nfc(surface), lemma_n))
            normalized.append((doc_id, tuple(out)))
        return cls(tuple(normalized))

    def token_count(self) -> int:
        return sum(len(tokens) for _, tokens in self.documents)


@dataclass(frozen=True)
class FrequencyIndex:
    """Immutable lemma -> token count table.

    Invariants: every stored count is >= 1, the counts sum to total_tokens,
    and the mapping cannot be mutated after construction. Safe to share
    across threads; all queries are pure.
    """

    counts: Mapping[str, int]
    total_tokens: int
    # label is provenance only; the serialized form does not carry it
    source_label: str = field(default="", compare=False)

    def frequency(self, lemma: str) -> int:
        """Token count of a lemma, 0 if absent. The query is NFC-normalized first."""
        return self.counts.get(nfc(lemma), 0)

    def zipf(self, lemma: str) -> float:
        """Zipf-scaled frequency: log10(count * ZIPF_SCALE / total_tokens).

        Absent lemmas get exactly 0.0.
        """
        if self.total_tokens == 0:
            raise DataError("zipf undefined for an empty index (total_tokens == 0)")
        c = self.frequency(lemma)
        if c == 0:
            return 0.0
        return math.log10(c * ZIPF_SCALE / self.total_tokens)

    def to_tsv(self) -> str:
        """Serialize as '#total<TAB>N' then 'lemma<TAB>count' lines, lemma-sorted."""
        lines = [f"#total\t{self.total_tokens}"]
        for lemma in sorted(self.counts):
            lines.append(f"{lemma}\t{self.counts[lemma]}")
        return "\n".join(lines) + "\n"


def build_index(stream: LemmaStream, source_label: str = "") -> FrequencyIndex:
    """Count per-token lemma occurrences over all documents of a stream.

    Counting is a commutative sum over documents, so per-document counting
    merges deterministically regardless of processing order.
    """
    if not stream.documents:
        raise DataError("empty corpus")
    counts: Counter[str] = Counter()
    total = 0
    for _, tokens in stream.documents:
        for _, lemma in tokens:
            counts[lemma] += 1
            total += 1
    if total == 0:
        raise DataError("empty corpus")
    return FrequencyIndex(MappingProxyType(dict(counts)), total, source_label)


def read_stream_jsonl(paths: Sequence[str | Path]) -> LemmaStream:
    """Read documents from JSON Lines files.

    One document per line:
    {"doc_id": "...", "tokens": [{"surface": "...", "lemma": "..."}, ...]}
    """
    documents: list[tuple[str, list[TokenPair]]] = []
    for path in paths:
        path = Path(path)
        with path.open(encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                    doc_id = obj["doc_id"]
                    tokens = [(t["surface"], t["lemma"]) for t in obj["tokens"]]
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise DataError(f"{path}:{lineno}: malformed document record: {exc}") from exc
                if not isinstance(doc_id, str):
                    raise DataError(f"{path}:{lineno}: doc_id must be a string")
                documents.append((doc_id, tokens))
    if not documents:
        raise DataError("empty corpus")
    return LemmaStream.from_documents(documents)


def read_stream_tsv(paths: Sequence[str | Path]) -> LemmaStream:
    """Read documents from TSV files: 'doc_id<TAB>surface<TAB>lemma', one token per line.

    Lines sharing a doc_id form one document; a doc_id may not reappear after
    a different one intervenes.
    """
    documents: list[tuple[str, list[TokenPair]]] = []
    finished: set[str] = set()
    current: str | None = None
    for path in paths:
        path = Path(path)
        with path.open(encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise DataError(
                        f"{path}:{lineno}: expected doc_id<TAB>surface<TAB>lemma, got {len(parts)} fields"
                    )
                doc_id, surface, lemma = parts
                if doc_id != current:
                    if doc_id in finished:
                        raise DataError(
                            f"{path}:{lineno}: doc_id {doc_id!r} reappears after other documents"
                        )
                    if current is not None:
                        finished.add(current)
                    current = doc_id
                    documents.append((doc_id, []))
                documents[-1][1].append((surface, lemma))
    if not documents:
        raise DataError("empty corpus")
    return LemmaStream.from_documents(documents)


def write_index(index: FrequencyIndex, path: str | Path) -> None:
    Path(path).write_text(index.to_tsv(), encoding="utf-8")


def read_index(path: str | Path, source_label: str | None = None) -> FrequencyIndex:
    """Parse the TSV index format written by write_index, validating the total."""
    path = Path(path)
    counts: dict[str, int] = {}
    total: int | None = None
    with path.open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected two tab-separated fields")
            key, value = parts
            if key == "#total":
                if total is not None:
                    raise DataError(f"{path}:{lineno}: duplicate #total header")
                total = int(value)
                continue
            if total is None:
                raise DataError(f"{path}:1: missing '#total<TAB>N' header line")
            lemma = nfc(key)
            count = int(value)
            if count < 1:
                raise DataError(f"{path}:{lineno}: count must be >= 1 for {lemma!r}")
            if lemma in counts:
                raise DataError(f"{path}:{lineno}: duplicate lemma {lemma!r}")
            counts[lemma] = count
    if total is None:
        raise DataError(f"{path}: missing '#total<TAB>N' header line")
    if sum(counts.values()) != total:
        raise DataError(f"{path}: counts sum to {sum(counts.values())}, header says {total}")
    label = source_label if source_label is not None else path.name
    return FrequencyIndex(MappingProxyType(counts), total, label)
