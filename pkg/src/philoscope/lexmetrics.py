"""Native lexical MT metrics: BLEU-4, chrF++, and ROUGE-L with multi-reference support.

All metrics return values in [0, 1] and operate on Segments produced by one
fixed tokenizer, so scores are deterministic across runs and platforms.
Multi-reference protocols: BLEU clips n-gram counts against the per-reference
maximum and takes the brevity-penalty reference closest in length (ties to
the shorter); chrF++ and ROUGE-L take the maximum score over references.
"""

from __future__ import annotations

import csv
import enum
import math
import unicodedata
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .errors import DataError, MetricError
from .util import nfc

BLEU_MAX_ORDER = 4
CHRF_CHAR_ORDER = 6
CHRF_WORD_ORDER = 2
CHRF_BETA = 2.0
SMOOTHING_MODES = ("none", "add1")


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> tuple[str, ...]:
    """Fixed metric tokenizer.

    NFC-normalize, lowercase, split on Unicode whitespace, then peel leading
    and trailing punctuation characters off each chunk as standalone tokens.
    """
    tokens: list[str] = []
    for chunk in nfc(text).lower().split():
        leading: list[str] = []
        while chunk and _is_punct(chunk[0]):
            leading.append(chunk[0])
            chunk = chunk[1:]
        trailing: list[str] = []
        while chunk and _is_punct(chunk[-1]):
            trailing.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(leading)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trailing))
    return tuple(tokens)


@dataclass(frozen=True)
class Segment:
    """Tokenized text plus its whitespace-free character sequence.

    chars drives character n-grams (spaces never participate); tokens drive
    word n-grams and LCS.
    """

    tokens: tuple[str, ...]
    chars: str

    @classmethod
    def from_text(cls, text: str) -> "Segment":
        normalized = nfc(text).lower()
        return cls(tokens=tokenize(text), chars="".join(normalized.split()))


def _require_nonempty(hypothesis: Segment, references: Sequence[Segment]) -> None:
    if not hypothesis.tokens:
        raise MetricError("empty hypothesis")
    if not references:
        raise MetricError("no references")
    for i, ref in enumerate(references):
        if not ref.tokens:
            raise MetricError(f"empty reference at position {i}")


def ngram_counts(items: Sequence, n: int) -> Counter:
    return Counter(tuple(items[i : i + n]) for i in range(len(items) - n + 1))


def bleu4(
    hypothesis: Segment,
    references: Sequence[Segment],
    smoothing: str = "none",
) -> float:
    """Multi-reference BLEU up to 4-grams.

    smoothing='none': a zero n-gram precision zeroes the whole score.
    smoothing='add1': orders >= 2 use (matches + 1) / (total + 1), so short
    overlaps still produce a graded score. Orders the hypothesis is too short
    to populate are dropped from the geometric mean.
    """
    if smoothing not in SMOOTHING_MODES:
        raise MetricError(f"unknown smoothing mode {smoothing!r}; expected one of {SMOOTHING_MODES}")
    _require_nonempty(hypothesis, references)
    log_sum = 0.0
    orders_used = 0
    for n in range(1, BLEU_MAX_ORDER + 1):
        hyp_counts = ngram_counts(hypothesis.tokens, n)
        total = sum(hyp_counts.values())
        if total == 0:
            continue
        clip: Counter = Counter()
        for ref in references:
            ref_counts = ngram_counts(ref.tokens, n)
            for gram, c in ref_counts.items():
                if c > clip[gram]:
                    clip[gram] = c
        matches = sum(min(c, clip[gram]) for gram, c in hyp_counts.items())
        if smoothing == "add1" and n >= 2:
            precision = (matches + 1) / (total + 1)
        else:
            if matches == 0:
                return 0.0
            precision = matches / total
        log_sum += math.log(precision)
        orders_used += 1
    geo_mean = math.exp(log_sum / orders_used)
    hyp_len = len(hypothesis.tokens)
    # brevity penalty uses the reference length closest to the hypothesis, ties to shorter
    ref_len = min(
        (r_len for r_len in (len(r.tokens) for r in references)),
        key=lambda r_len: (abs(r_len - hyp_len), r_len),
    )
    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    return bp * geo_mean


def _chrf_single(hypothesis: Segment, reference: Segment, char_order: int, word_order: int, beta: float) -> float:
    precisions: list[float] = []
    recalls: list[float] = []

    def add_order(hyp_items: Sequence, ref_items: Sequence, n: int) -> None:
        hyp_counts = ngram_counts(hyp_items, n)
        ref_counts = ngram_counts(ref_items, n)
        hyp_total = sum(hyp_counts.values())
        ref_total = sum(ref_counts.values())
        if hyp_total == 0 and ref_total == 0:
            return  # order unpopulated on both sides: excluded from the average
        matches = sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
        precisions.append(matches / hyp_total if hyp_total else 0.0)
        recalls.append(matches / ref_total if ref_total else 0.0)

    for n in range(1, char_order + 1):
        add_order(hypothesis.chars, reference.chars, n)
    for n in range(1, word_order + 1):
        add_order(hypothesis.tokens, reference.tokens, n)
    if not precisions:
        return 0.0
    avg_p = sum(precisions) / len(precisions)
    avg_r = sum(recalls) / len(recalls)
    denom = beta * beta * avg_p + avg_r
    if denom == 0.0:
        return 0.0
    return (1 + beta * beta) * avg_p * avg_r / denom


def chrf_pp(
    hypothesis: Segment,
    references: Sequence[Segment],
    char_order: int = CHRF_CHAR_ORDER,
    word_order: int = CHRF_WORD_ORDER,
    beta: float = CHRF_BETA,
) -> float:
    """chrF++: F-beta over averaged character (orders 1..6) and word (1..2)
    n-gram precisions/recalls. Multi-reference score is the maximum."""
    _require_nonempty(hypothesis, references)
    if not hypothesis.chars:
        raise MetricError("hypothesis has no characters")
    return max(_chrf_single(hypothesis, ref, char_order, word_order, beta) for ref in references)


def lcs_length(a: Sequence, b: Sequence) -> int:
    """Longest common subsequence length by dynamic programming, O(len(a)*len(b))."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(hypothesis: Segment, references: Sequence[Segment]) -> float:
    """ROUGE-L: harmonic-mean F of LCS precision and recall over word tokens.
    Multi-reference score is the maximum."""
    _require_nonempty(hypothesis, references)
    best = 0.0
    for ref in references:
        lcs = lcs_length(hypothesis.tokens, ref.tokens)
        if lcs == 0:
            continue
        p = lcs / len(hypothesis.tokens)
        r = lcs / len(ref.tokens)
        best = max(best, 2 * p * r / (p + r))
    return best


def best_reference(per_reference_scores: Mapping[str, float]) -> tuple[str, float]:
    """Maximizing reference id and score; ties go to the lexicographically smallest id."""
    if not per_reference_scores:
        raise MetricError("no per-reference scores")
    best_id = min(per_reference_scores, key=lambda k: (-per_reference_scores[k], k))
    return best_id, per_reference_scores[best_id]


# ---------------------------------------------------------------------------
# Score records
# ---------------------------------------------------------------------------

class Metric(enum.Enum):
    BLEU4 = "BLEU-4"
    CHRFPP = "chrF++"
    ROUGE_L = "ROUGE-L"
    METEOR = "METEOR"
    BERTSCORE = "BERTScore"
    COMET = "COMET"
    BLEURT = "BLEURT"


class Provenance(enum.Enum):
    NATIVE = "Native"
    INGESTED = "Ingested"


NATIVE_METRICS = frozenset({Metric.BLEU4, Metric.CHRFPP, Metric.ROUGE_L})


@dataclass(frozen=True)
class MetricScore:
    metric: Metric
    value: float
    reference_id: Optional[str] = None
    provenance: Provenance = Provenance.NATIVE

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise DataError(f"{self.metric.value} score out of [0, 1]: {self.value}")
        if self.provenance is Provenance.NATIVE and self.metric not in NATIVE_METRICS:
            raise DataError(f"{self.metric.value} cannot have Native provenance")


INGESTED_COLUMNS = ("text", "passage", "model", "metric", "reference_id", "value")

_METRIC_BY_NAME = {m.value: m for m in Metric}


def read_ingested_scores(path: str | Path) -> list[tuple[tuple[str, int, str], MetricScore]]:
    """Read externally computed metric scores keyed by (text, passage, model).

    Values are proportions in [0, 1]. Anything may be ingested (including the
    natively computable metrics, e.g. scores produced by another toolchain);
    provenance is always Ingested.
    """
    path = Path(path)
    rows = []
    with path.open(encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != list(INGESTED_COLUMNS):
            raise DataError(f"{path}: expected header {','.join(INGESTED_COLUMNS)}")
        for lineno, row in enumerate(reader, start=2):
            metric = _METRIC_BY_NAME.get(row["metric"])
            if metric is None:
                raise DataError(
                    f"{path}:{lineno}: unknown metric {row['metric']!r}; "
                    f"expected one of {sorted(_METRIC_BY_NAME)}"
                )
            try:
                key = (row["text"], int(row["passage"]), row["model"])
                value = float(row["value"])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            if not 0.0 <= value <= 1.0:
                raise DataError(f"{path}:{lineno}: value {value} outside [0, 1]")
            rows.append(
                (key, MetricScore(metric, value, reference_id=row["reference_id"] or None,
                                  provenance=Provenance.INGESTED))
            )
    if not rows:
        raise DataError(f"{path}: no score rows")
    return rows


# ---------------------------------------------------------------------------
# Batch scoring (CLI surface)
# ---------------------------------------------------------------------------

PAIRS_COLUMNS = ("text", "passage", "model", "hypothesis_path", "reference_paths")


def score_pairs_csv(pairs_path: str | Path, smoothing: str = "none") -> list[dict]:
    """Score hypothesis/reference text-file pairs listed in a CSV.

    Columns: text,passage,model,hypothesis_path,reference_paths where
    reference_paths is semicolon-separated. Paths resolve relative to the CSV.
    """
    pairs_path = Path(pairs_path)
    base = pairs_path.parent
    rows = []
    with pairs_path.open(encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != list(PAIRS_COLUMNS):
            raise DataError(f"{pairs_path}: expected header {','.join(PAIRS_COLUMNS)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                hyp_text = (base / row["hypothesis_path"]).read_text(encoding="utf-8")
                ref_paths = [p for p in row["reference_paths"].split(";") if p]
                refs_text = [(base / p).read_text(encoding="utf-8") for p in ref_paths]
            except OSError as exc:
                raise DataError(f"{pairs_path}:{lineno}: {exc}") from exc
            if not refs_text:
                raise DataError(f"{pairs_path}:{lineno}: no reference paths")
            hyp = Segment.from_text(hyp_text)
            refs = [Segment.from_text(t) for t in refs_text]
            rows.append(
                {
                    "text": row["text"],
                    "passage": row["passage"],
                    "model": row["model"],
                    "bleu4": bleu4(hyp, refs, smoothing=smoothing),
                    "chrfpp": chrf_pp(hyp, refs),
                    "rouge_l": rouge_l(hyp, refs),
                    "smoothing": smoothing,
                }
            )
    if not rows:
        raise DataError(f"{pairs_path}: no pairs")
    return rows


def pairs_results_to_csv(rows: Iterable[dict]) -> str:
    lines = ["text,passage,model,bleu4,chrfpp,rouge_l,smoothing"]
    for r in rows:
        lines.append(
            f"{r['text']},{r['passage']},{r['model']},"
            f"{r['bleu4']:.6f},{r['chrfpp']:.6f},{r['rouge_l']:.6f},{r['smoothing']}"
        )
    return "\n".join(lines) + "\n"
