"""Translation quality scoring from severity-tagged error annotations.

Every error carries a type (Terminology or Accuracy), a subtype, and a
severity. Severities weigh 0/1/5/25 (Neutral/Minor/Major/Critical); the
quality score (TQS) is 100 minus the weighted penalty per word, times 100,
clamped at 0. Two rating schemes map TQS to High Pass / Low Pass / Fail:
scheme 1 by thresholds alone, scheme 2 additionally failing any translation
that contains at least one Critical error.
"""

from __future__ import annotations

import csv
import enum
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .errors import DataError
from .util import round_half_up


class Severity(enum.Enum):
    NEUTRAL = "Neutral"
    MINOR = "Minor"
    MAJOR = "Major"
    CRITICAL = "Critical"


SEVERITY_WEIGHTS: Mapping[Severity, int] = {
    Severity.NEUTRAL: 0,
    Severity.MINOR: 1,
    Severity.MAJOR: 5,
    Severity.CRITICAL: 25,
}


class ErrorType(enum.Enum):
    TERMINOLOGY = "Terminology"
    ACCURACY = "Accuracy"


class Subtype(enum.Enum):
    TERM_ACCURACY = "TermAccuracy"
    TERM_CONSISTENCY = "TermConsistency"
    MISTRANSLATION = "Mistranslation"
    OVERTRANSLATION = "Overtranslation"
    UNDERTRANSLATION = "Undertranslation"
    ADDITION = "Addition"
    OMISSION = "Omission"


SUBTYPE_PARENT: Mapping[Subtype, ErrorType] = {
    Subtype.TERM_ACCURACY: ErrorType.TERMINOLOGY,
    Subtype.TERM_CONSISTENCY: ErrorType.TERMINOLOGY,
    Subtype.MISTRANSLATION: ErrorType.ACCURACY,
    Subtype.OVERTRANSLATION: ErrorType.ACCURACY,
    Subtype.UNDERTRANSLATION: ErrorType.ACCURACY,
    Subtype.ADDITION: ErrorType.ACCURACY,
    Subtype.OMISSION: ErrorType.ACCURACY,
}


class Rating(enum.Enum):
    HIGH_PASS = "HP"
    LOW_PASS = "LP"
    FAIL = "F"

    @property
    def label(self) -> str:
        return {"HP": "High Pass", "LP": "Low Pass", "F": "Fail"}[self.value]


@dataclass(frozen=True)
class SeverityCounts:
    neutral: int = 0
    minor: int = 0
    major: int = 0
    critical: int = 0

    def __post_init__(self) -> None:
        for name in ("neutral", "minor", "major", "critical"):
            if getattr(self, name) < 0:
                raise DataError(f"negative {name} count")

    @property
    def total(self) -> int:
        return self.neutral + self.minor + self.major + self.critical

    def __add__(self, other: "SeverityCounts") -> "SeverityCounts":
        return SeverityCounts(
            self.neutral + other.neutral,
            self.minor + other.minor,
            self.major + other.major,
            self.critical + other.critical,
        )

    @classmethod
    def from_annotations(cls, annotations: Iterable["ErrorAnnotation"]) -> "SeverityCounts":
        c = {s: 0 for s in Severity}
        for a in annotations:
            c[a.severity] += 1
        return cls(c[Severity.NEUTRAL], c[Severity.MINOR], c[Severity.MAJOR], c[Severity.CRITICAL])


@dataclass(frozen=True)
class ErrorAnnotation:
    error_type: ErrorType
    subtype: Subtype
    severity: Severity
    note: Optional[str] = None

    def __post_init__(self) -> None:
        if SUBTYPE_PARENT[self.subtype] is not self.error_type:
            raise DataError(
                f"subtype {self.subtype.value} does not belong to error type {self.error_type.value}"
            )


@dataclass(frozen=True)
class TranslationRecord:
    """One translation of one passage by one model, with its error annotations."""

    text_id: str
    passage_id: int
    model: str
    word_count: int
    annotations: tuple[ErrorAnnotation, ...] = ()

    def __post_init__(self) -> None:
        if self.word_count <= 0:
            raise DataError(
                f"{self.text_id}:{self.passage_id}:{self.model}: word_count must be positive"
            )

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.text_id, self.passage_id, self.model)


@dataclass(frozen=True)
class QualityResult:
    tqs: float
    rating_scheme1: Rating
    rating_scheme2: Rating
    has_critical: bool
    severity_counts: SeverityCounts


def tqs(counts: SeverityCounts, word_count: int) -> float:
    """TQS = 100 - (weighted penalty / word_count * 100), clamped at 0.

    Weights: Minor 1, Major 5, Critical 25; Neutral contributes nothing.
    """
    if word_count <= 0:
        raise DataError("word_count must be positive")
    penalty = (
        SEVERITY_WEIGHTS[Severity.MINOR] * counts.minor
        + SEVERITY_WEIGHTS[Severity.MAJOR] * counts.major
        + SEVERITY_WEIGHTS[Severity.CRITICAL] * counts.critical
    )
    raw = 100.0 - (penalty / word_count * 100.0)
    return max(raw, 0.0)


def rate_scheme1(tqs_value: float) -> Rating:
    """Threshold rating: High Pass >= 95, Low Pass in [87, 95), Fail < 87."""
    if tqs_value >= 95.0:
        return Rating.HIGH_PASS
    if tqs_value >= 87.0:
        return Rating.LOW_PASS
    return Rating.FAIL


def rate_scheme2(tqs_value: float, critical_count: int) -> Rating:
    """Gated rating: any Critical error forces Fail regardless of TQS."""
    if critical_count >= 1:
        return Rating.FAIL
    return rate_scheme1(tqs_value)


def score(record: TranslationRecord) -> QualityResult:
    counts = SeverityCounts.from_annotations(record.annotations)
    value = tqs(counts, record.word_count)
    return QualityResult(
        tqs=value,
        rating_scheme1=rate_scheme1(value),
        rating_scheme2=rate_scheme2(value, counts.critical),
        has_critical=counts.critical >= 1,
        severity_counts=counts,
    )


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScoredTranslation:
    """The unit aggregation works on: a keyed TQS with severity counts.

    Produced either by score() on annotated records or directly from a
    scored fixture row.
    """

    text_id: str
    passage_id: int
    model: str
    tqs: float
    counts: SeverityCounts

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.text_id, self.passage_id, self.model)

    @property
    def rating_scheme1(self) -> Rating:
        return rate_scheme1(self.tqs)

    @property
    def rating_scheme2(self) -> Rating:
        return rate_scheme2(self.tqs, self.counts.critical)


@dataclass(frozen=True)
class ExclusionFilter:
    """Drops (text, passage[, model]) cells from an aggregation.

    Spec strings look like 'Comp:8,Comp:10' or 'Comp:3:ChatGPT'; an entry
    without a model excludes the passage for every model.
    """

    entries: frozenset[tuple[str, int, Optional[str]]] = frozenset()

    @classmethod
    def parse(cls, spec: str) -> "ExclusionFilter":
        entries = set()
        for part in spec.split(","):
            part = part.strip()
            if not part:
                continue
            bits = part.split(":")
            if len(bits) == 2:
                text, passage = bits
                model = None
            elif len(bits) == 3:
                text, passage, model = bits
            else:
                raise DataError(f"bad exclusion {part!r}: expected TEXT:PASSAGE[:MODEL]")
            try:
                entries.add((text, int(passage), model))
            except ValueError as exc:
                raise DataError(f"bad exclusion {part!r}: passage must be an integer") from exc
        return cls(frozenset(entries))

    def excludes(self, text_id: str, passage_id: int, model: str) -> bool:
        return (text_id, passage_id, None) in self.entries or (
            text_id,
            passage_id,
            model,
        ) in self.entries

    @property
    def label(self) -> str:
        if not self.entries:
            return "none"
        parts = []
        for text, passage, model in sorted(self.entries, key=lambda e: (e[0], e[1], e[2] or "")):
            parts.append(f"{text}:{passage}" + (f":{model}" if model else ""))
        return ",".join(parts)


def sample_sd(values: Sequence[float]) -> float:
    """Sample standard deviation (n-1 denominator); 0.0 for a single value."""
    n = len(values)
    if n < 2:
        return 0.0
    m = sum(values) / n
    return math.sqrt(sum((v - m) ** 2 for v in values) / (n - 1))


@dataclass(frozen=True)
class GroupStats:
    n: int
    mean_tqs: float
    sd_tqs: float
    critical_total: int
    ratings_scheme1: tuple[int, int, int]  # (HP, LP, F) counts
    ratings_scheme2: tuple[int, int, int]
    severity: SeverityCounts

    @property
    def single_observation(self) -> bool:
        # SD is reported as 0 but carries no spread information at n == 1
        return self.n == 1

    def rating_pct(self, scheme: int, rating: Rating) -> float:
        """Unrounded percentage of records with the given rating under a scheme."""
        counts = self.ratings_scheme1 if scheme == 1 else self.ratings_scheme2
        idx = (Rating.HIGH_PASS, Rating.LOW_PASS, Rating.FAIL).index(rating)
        return 100.0 * counts[idx] / self.n

    def pass_rate(self, scheme: int) -> float:
        """Unrounded High Pass + Low Pass percentage."""
        counts = self.ratings_scheme1 if scheme == 1 else self.ratings_scheme2
        return 100.0 * (counts[0] + counts[1]) / self.n


@dataclass(frozen=True)
class AggregateReport:
    """Aggregates over a (possibly filtered) set of scored translations.

    groups is keyed by (text, model) plus (text, None) per-text rows;
    gaps holds each text's mean-TQS difference from the baseline text.
    """

    groups: Mapping[tuple[str, Optional[str]], GroupStats]
    gaps: Mapping[str, Optional[float]]
    baseline_text: Optional[str]
    n_records: int
    exclusions: ExclusionFilter

    def texts(self) -> list[str]:
        return sorted({t for (t, m) in self.groups if m is None})


def _group_stats(rows: Sequence[ScoredTranslation]) -> GroupStats:
    tqs_values = [r.tqs for r in rows]
    order = (Rating.HIGH_PASS, Rating.LOW_PASS, Rating.FAIL)
    r1 = tuple(sum(1 for r in rows if r.rating_scheme1 is rating) for rating in order)
    r2 = tuple(sum(1 for r in rows if r.rating_scheme2 is rating) for rating in order)
    severity = SeverityCounts()
    for r in rows:
        severity = severity + r.counts
    return GroupStats(
        n=len(rows),
        mean_tqs=sum(tqs_values) / len(tqs_values),
        sd_tqs=sample_sd(tqs_values),
        critical_total=sum(r.counts.critical for r in rows),
        ratings_scheme1=r1,
        ratings_scheme2=r2,
        severity=severity,
    )


def apply_exclusions(
    rows: Iterable[ScoredTranslation], exclusions: Optional[ExclusionFilter]
) -> list[ScoredTranslation]:
    if exclusions is None:
        exclusions = ExclusionFilter()
    kept = [r for r in rows if not exclusions.excludes(r.text_id, r.passage_id, r.model)]
    return sorted(kept, key=lambda r: r.key)


def aggregate(
    rows: Iterable[ScoredTranslation],
    exclusions: Optional[ExclusionFilter] = None,
    baseline_text: Optional[str] = None,
) -> AggregateReport:
    """Mean/SD TQS, critical totals, and rating tallies per (text, model) and per text.

    Aggregation is a deterministic fold in (text, passage, model) order.
    """
    exclusions = exclusions or ExclusionFilter()
    kept = apply_exclusions(rows, exclusions)
    if not kept:
        raise DataError(f"no records left after exclusions [{exclusions.label}]")
    by_group: dict[tuple[str, Optional[str]], list[ScoredTranslation]] = defaultdict(list)
    for r in kept:
        by_group[(r.text_id, r.model)].append(r)
        by_group[(r.text_id, None)].append(r)
    groups = {k: _group_stats(v) for k, v in sorted(by_group.items(), key=lambda kv: (kv[0][0], kv[0][1] or ""))}
    gaps: dict[str, Optional[float]] = {}
    texts = sorted({t for (t, m) in groups if m is None})
    if baseline_text is not None:
        if (baseline_text, None) not in groups:
            raise DataError(f"baseline text {baseline_text!r} has no records after exclusions")
        base_mean = groups[(baseline_text, None)].mean_tqs
        for t in texts:
            gaps[t] = None if t == baseline_text else groups[(t, None)].mean_tqs - base_mean
    return AggregateReport(
        groups=groups,
        gaps=gaps,
        baseline_text=baseline_text,
        n_records=len(kept),
        exclusions=exclusions,
    )


@dataclass(frozen=True)
class Stratum:
    label: str
    exclusions: ExclusionFilter
    n: int
    mean_tqs: float
    sd_tqs: float
    gap: Optional[float]
    pass_rate_scheme1: float
    pass_rate_scheme2: float
    pass_gap_scheme1: Optional[float]
    pass_gap_scheme2: Optional[float]


def stratify(
    rows: Iterable[ScoredTranslation],
    exclusion_sets: Sequence[tuple[str, ExclusionFilter]],
    target_text: str,
    baseline_text: str,
) -> list[Stratum]:
    """Target-text aggregates under successive exclusion sets, with gaps vs an
    unfiltered baseline text (gap = target mean - baseline mean, computed
    before any display rounding)."""
    rows = list(rows)
    base = [r for r in rows if r.text_id == baseline_text]
    if not base:
        raise DataError(f"baseline text {baseline_text!r} has no records")
    base_stats = _group_stats(sorted(base, key=lambda r: r.key))
    out = []
    for label, excl in exclusion_sets:
        kept = [
            r
            for r in apply_exclusions(rows, excl)
            if r.text_id == target_text
        ]
        if not kept:
            raise DataError(f"no {target_text!r} records left under exclusions [{excl.label}]")
        stats = _group_stats(kept)
        out.append(
            Stratum(
                label=label,
                exclusions=excl,
                n=stats.n,
                mean_tqs=stats.mean_tqs,
                sd_tqs=stats.sd_tqs,
                gap=stats.mean_tqs - base_stats.mean_tqs,
                pass_rate_scheme1=stats.pass_rate(1),
                pass_rate_scheme2=stats.pass_rate(2),
                pass_gap_scheme1=base_stats.pass_rate(1) - stats.pass_rate(1),
                pass_gap_scheme2=base_stats.pass_rate(2) - stats.pass_rate(2),
            )
        )
    return out


# ---------------------------------------------------------------------------
# Error typology
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TypologyReport:
    """Error counts per text by severity, type, and subtype.

    Percentages are of total errors within a text. The cross-text ratio for
    count rows divides raw counts; for percentage rows it divides the
    half-up-rounded percentages, matching how the rendered tables are read.
    """

    texts: tuple[str, ...]
    n_records: Mapping[str, int]
    severity: Mapping[str, Mapping[Severity, int]]
    by_type: Mapping[str, Mapping[ErrorType, int]]
    by_subtype: Mapping[str, Mapping[Subtype, int]]

    def total_errors(self, text: str) -> int:
        return sum(self.severity[text].values())

    def pct(self, text: str, count: int) -> float:
        total = self.total_errors(text)
        return 0.0 if total == 0 else 100.0 * count / total

    def count_ratio(self, num_text: str, den_text: str, num: int, den: int) -> Optional[float]:
        del num_text, den_text
        return None if den == 0 else num / den

    def pct_ratio(self, num_text: str, den_text: str, num: int, den: int) -> Optional[float]:
        num_pct = round_half_up(self.pct(num_text, num), 1)
        den_pct = round_half_up(self.pct(den_text, den), 1)
        return None if den_pct == 0 else num_pct / den_pct


def error_typology(records: Iterable[TranslationRecord]) -> TypologyReport:
    severity: dict[str, dict[Severity, int]] = {}
    by_type: dict[str, dict[ErrorType, int]] = {}
    by_subtype: dict[str, dict[Subtype, int]] = {}
    n_records: dict[str, int] = {}
    for rec in sorted(records, key=lambda r: r.key):
        t = rec.text_id
        if t not in severity:
            severity[t] = {s: 0 for s in Severity}
            by_type[t] = {e: 0 for e in ErrorType}
            by_subtype[t] = {s: 0 for s in Subtype}
            n_records[t] = 0
        n_records[t] += 1
        for ann in rec.annotations:
            severity[t][ann.severity] += 1
            by_type[t][ann.error_type] += 1
            by_subtype[t][ann.subtype] += 1
    return TypologyReport(
        texts=tuple(sorted(severity)),
        n_records=n_records,
        severity=severity,
        by_type=by_type,
        by_subtype=by_subtype,
    )


# ---------------------------------------------------------------------------
# Annotation CSV input
# ---------------------------------------------------------------------------

ANNOTATION_COLUMNS = ("text", "passage", "model", "word_count", "error_type", "subtype", "severity", "note")


def read_annotations_csv(path: str | Path) -> list[TranslationRecord]:
    """Read error annotations, one row per error.

    Translations with zero errors appear once with empty error columns.
    Rows sharing (text, passage, model) must agree on word_count.
    """
    path = Path(path)
    by_key: dict[tuple[str, int, str], dict] = {}
    with path.open(encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != list(ANNOTATION_COLUMNS):
            raise DataError(
                f"{path}: expected header {','.join(ANNOTATION_COLUMNS)}, got {reader.fieldnames}"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                key = (row["text"], int(row["passage"]), row["model"])
                word_count = int(row["word_count"])
            except (TypeError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: bad key or word_count: {exc}") from exc
            entry = by_key.setdefault(key, {"word_count": word_count, "annotations": [], "empty_row": False})
            if entry["word_count"] != word_count:
                raise DataError(
                    f"{path}:{lineno}: word_count {word_count} disagrees with earlier "
                    f"{entry['word_count']} for {key}"
                )
            if not (row["error_type"] or row["subtype"] or row["severity"]):
                entry["empty_row"] = True
                continue
            try:
                annotation = ErrorAnnotation(
                    error_type=ErrorType(row["error_type"]),
                    subtype=Subtype(row["subtype"]),
                    severity=Severity(row["severity"]),
                    note=row["note"] or None,
                )
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            entry["annotations"].append(annotation)
    if not by_key:
        raise DataError(f"{path}: no annotation rows")
    records = []
    for key in sorted(by_key):
        entry = by_key[key]
        if entry["empty_row"] and entry["annotations"]:
            raise DataError(f"{path}: {key} has both a zero-error row and error rows")
        records.append(
            TranslationRecord(
                text_id=key[0],
                passage_id=key[1],
                model=key[2],
                word_count=entry["word_count"],
                annotations=tuple(entry["annotations"]),
            )
        )
    return records


def scored_from_records(records: Iterable[TranslationRecord]) -> list[ScoredTranslation]:
    """Score annotated records into the aggregation unit, enforcing key uniqueness."""
    seen = set()
    out = []
    for rec in records:
        if rec.key in seen:
            raise DataError(f"duplicate (text, passage, model) key: {rec.key}")
        seen.add(rec.key)
        q = score(rec)
        out.append(ScoredTranslation(rec.text_id, rec.passage_id, rec.model, q.tqs, q.severity_counts))
    return out
