"""Fixture dataset: parsing, validation, cross-table consistency, and joins.

The bundled fixture set covers 60 translations (2 texts x 10 passages x 3
models): per-translation MQM scores with severity counts (canonical), a
metric table carrying automated scores, and per-passage rarity profiles.
A machine-readable sidecar lists the known TQS cells where the two source
tables disagree, so verification can tell a known publication inconsistency
from a pipeline bug. The MQM table is canonical wherever they disagree.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .errors import DataError, DiscrepancyError
from .mqm import Rating, ScoredTranslation, SeverityCounts, rate_scheme1, sample_sd
from .stats import PairedSeries

FIXTURE_VERSION = "si-fixtures-v1"

TEXTS = ("Mix", "Comp")
MODELS = ("ChatGPT", "Claude", "Gemini")
PASSAGES = tuple(range(1, 11))

FIXTURE_FILES = {
    "mqm": "table_s2_mqm.csv",
    "metrics": "table_s1_metrics.csv",
    "rarity": "table_s6_rarity.csv",
    "discrepancies": "s1_s2_discrepancies.csv",
    "expected_aggregates": "expected_aggregates.csv",
    "expected_severity": "expected_severity.csv",
}

# Automated-metric columns available per translation in the metric table.
METRIC_COLUMNS = ("bleu4", "bertscore", "comet")


@dataclass(frozen=True)
class MqmRow:
    text: str
    passage: int
    model: str
    tqs: float
    rating: Rating
    counts: SeverityCounts

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.text, self.passage, self.model)

    def scored(self) -> ScoredTranslation:
        return ScoredTranslation(self.text, self.passage, self.model, self.tqs, self.counts)


@dataclass(frozen=True)
class MetricRow:
    """Automated scores as printed (percent scale), with that table's own TQS/rating."""

    text: str
    passage: int
    model: str
    tqs: float
    bleu4: float
    bertscore: float
    comet: float
    rating: Rating

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.text, self.passage, self.model)

    def value(self, column: str) -> float:
        if column not in METRIC_COLUMNS:
            raise DataError(f"unknown metric column {column!r}")
        return getattr(self, column)


@dataclass(frozen=True)
class RarityRow:
    text: str
    passage: int
    terms: int
    avg_zipf: float
    rare: int
    not_found: int
    rare_ratio_pct: float
    nf_ratio_pct: float

    @property
    def key(self) -> tuple[str, int]:
        return (self.text, self.passage)

    # ratios are exact fractions of the integer columns; the *_pct fields
    # are the display-rounded values and only checked for consistency
    @property
    def rare_ratio(self) -> float:
        return self.rare / self.terms

    @property
    def nf_ratio(self) -> float:
        return self.not_found / self.terms


@dataclass(frozen=True)
class KnownDiscrepancy:
    text: str
    passage: int
    model: str
    tqs_s1: float
    tqs_s2: float


@dataclass(frozen=True)
class ExpectedAggregate:
    text: str
    model: Optional[str]  # None = per-text aggregate row
    tqs_mean: float
    tqs_sd: float
    critical_total: int


@dataclass(frozen=True)
class Dataset:
    mqm: tuple[MqmRow, ...]
    metrics: tuple[MetricRow, ...]
    rarity: tuple[RarityRow, ...]
    known_discrepancies: tuple[KnownDiscrepancy, ...]
    expected_aggregates: tuple[ExpectedAggregate, ...]
    expected_severity: Mapping[str, SeverityCounts]
    provenance: str
    warnings: tuple[str, ...] = ()

    def scored(self) -> list[ScoredTranslation]:
        return [row.scored() for row in self.mqm]

    def mqm_by_key(self) -> dict[tuple[str, int, str], MqmRow]:
        return {row.key: row for row in self.mqm}

    def rarity_by_key(self) -> dict[tuple[str, int], RarityRow]:
        return {row.key: row for row in self.rarity}


def fixture_dir() -> Path:
    return Path(str(resources.files("philoscope") / "fixtures"))


def _read_csv(path: Path, expected_columns: Sequence[str]) -> list[dict]:
    try:
        with path.open(encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None or list(reader.fieldnames) != list(expected_columns):
                raise DataError(
                    f"{path}: expected columns {','.join(expected_columns)}, got {reader.fieldnames}"
                )
            return [dict(row) for row in reader]
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc


def _parse_float(path: Path, lineno: int, name: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise DataError(f"{path}:{lineno}: column {name}: not a number: {raw!r}") from exc


def _parse_int(path: Path, lineno: int, name: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise DataError(f"{path}:{lineno}: column {name}: not an integer: {raw!r}") from exc


def verify_checksums(directory: Path) -> str:
    """Check every fixture file against the sha256 manifest; return the manifest digest."""
    manifest = directory / "fixtures.sha256"
    if not manifest.exists():
        raise DataError(f"missing checksum manifest {manifest}")
    listed = {}
    for line in manifest.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        digest, name = line.split()
        listed[name] = digest
    for name in FIXTURE_FILES.values():
        if name not in listed:
            raise DataError(f"fixture {name} missing from checksum manifest")
        actual = hashlib.sha256((directory / name).read_bytes()).hexdigest()
        if actual != listed[name]:
            raise DataError(f"fixture {name} checksum mismatch: corrupt or modified")
    return hashlib.sha256(manifest.read_bytes()).hexdigest()[:12]


def _universe_check(keys: set, expected: set, label: str) -> None:
    missing = sorted(expected - keys)
    extra = sorted(keys - expected)
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"missing keys {missing[:5]}{'...' if len(missing) > 5 else ''}")
        if extra:
            parts.append(f"unexpected keys {extra[:5]}{'...' if len(extra) > 5 else ''}")
        raise DataError(f"{label}: {'; '.join(parts)}")


def load(paths: Optional[Mapping[str, str | Path]] = None, strict: bool = False) -> Dataset:
    """Load, validate, and join the fixture tables.

    paths maps roles ('mqm', 'metrics', 'rarity', 'discrepancies',
    'expected_aggregates', 'expected_severity') to files; unspecified roles
    use the packaged fixtures. Checksums are verified when every role comes
    from the package. Cross-table TQS/rating disagreements covered by the
    discrepancy sidecar become warnings; any other disagreement is an error
    in strict mode and a warning (canonical table wins) otherwise.
    """
    packaged = fixture_dir()
    roles = {role: packaged / name for role, name in FIXTURE_FILES.items()}
    provenance = FIXTURE_VERSION
    if paths:
        unknown = set(paths) - set(FIXTURE_FILES)
        if unknown:
            raise DataError(f"unknown fixture roles: {sorted(unknown)}")
        for role, p in paths.items():
            roles[role] = Path(p)
        provenance = FIXTURE_VERSION + "+custom"
    else:
        digest = verify_checksums(packaged)
        provenance = f"{FIXTURE_VERSION}+sha256:{digest}"

    warnings: list[str] = []

    # --- canonical MQM table ---
    path = roles["mqm"]
    mqm_rows = []
    seen = set()
    for lineno, row in enumerate(
        _read_csv(path, ("text", "passage", "model", "tqs", "rating", "neutral", "minor", "major", "critical")),
        start=2,
    ):
        key = (row["text"], _parse_int(path, lineno, "passage", row["passage"]), row["model"])
        if key in seen:
            raise DataError(f"{path}:{lineno}: duplicate (text, passage, model) key {key}")
        seen.add(key)
        try:
            rating = Rating(row["rating"])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: bad rating {row['rating']!r}") from exc
        mqm_rows.append(
            MqmRow(
                text=key[0],
                passage=key[1],
                model=key[2],
                tqs=_parse_float(path, lineno, "tqs", row["tqs"]),
                rating=rating,
                counts=SeverityCounts(
                    _parse_int(path, lineno, "neutral", row["neutral"]),
                    _parse_int(path, lineno, "minor", row["minor"]),
                    _parse_int(path, lineno, "major", row["major"]),
                    _parse_int(path, lineno, "critical", row["critical"]),
                ),
            )
        )
    expected_keys = {(t, p, m) for t in TEXTS for p in PASSAGES for m in MODELS}
    _universe_check(seen, expected_keys, f"{path}")

    # --- metric table ---
    path = roles["metrics"]
    metric_rows = []
    seen_m = set()
    for lineno, row in enumerate(
        _read_csv(path, ("text", "passage", "model", "tqs", "bleu4", "bertscore", "comet", "rating")),
        start=2,
    ):
        key = (row["text"], _parse_int(path, lineno, "passage", row["passage"]), row["model"])
        if key in seen_m:
            raise DataError(f"{path}:{lineno}: duplicate (text, passage, model) key {key}")
        seen_m.add(key)
        metric_rows.append(
            MetricRow(
                text=key[0],
                passage=key[1],
                model=key[2],
                tqs=_parse_float(path, lineno, "tqs", row["tqs"]),
                bleu4=_parse_float(path, lineno, "bleu4", row["bleu4"]),
                bertscore=_parse_float(path, lineno, "bertscore", row["bertscore"]),
                comet=_parse_float(path, lineno, "comet", row["comet"]),
                rating=Rating(row["rating"]),
            )
        )
    _universe_check(seen_m, expected_keys, f"{path}")

    # --- rarity table ---
    path = roles["rarity"]
    rarity_rows = []
    seen_r = set()
    for lineno, row in enumerate(
        _read_csv(path, ("text", "passage", "terms", "avg_zipf", "rare_ratio_pct", "rare", "not_found", "nf_ratio_pct")),
        start=2,
    ):
        key = (row["text"], _parse_int(path, lineno, "passage", row["passage"]))
        if key in seen_r:
            raise DataError(f"{path}:{lineno}: duplicate (text, passage) key {key}")
        seen_r.add(key)
        rarity_rows.append(
            RarityRow(
                text=key[0],
                passage=key[1],
                terms=_parse_int(path, lineno, "terms", row["terms"]),
                avg_zipf=_parse_float(path, lineno, "avg_zipf", row["avg_zipf"]),
                rare=_parse_int(path, lineno, "rare", row["rare"]),
                not_found=_parse_int(path, lineno, "not_found", row["not_found"]),
                rare_ratio_pct=_parse_float(path, lineno, "rare_ratio_pct", row["rare_ratio_pct"]),
                nf_ratio_pct=_parse_float(path, lineno, "nf_ratio_pct", row["nf_ratio_pct"]),
            )
        )
    _universe_check(seen_r, {(t, p) for t in TEXTS for p in PASSAGES}, f"{path}")

    # --- known discrepancy sidecar ---
    path = roles["discrepancies"]
    discrepancies = tuple(
        KnownDiscrepancy(
            text=row["text"],
            passage=int(row["passage"]),
            model=row["model"],
            tqs_s1=float(row["tqs_s1"]),
            tqs_s2=float(row["tqs_s2"]),
        )
        for row in _read_csv(path, ("text", "passage", "model", "tqs_s1", "tqs_s2"))
    )
    known_cells = {(d.text, d.passage, d.model): d for d in discrepancies}

    # --- expected aggregates (verification reference) ---
    path = roles["expected_aggregates"]
    expected_aggregates = tuple(
        ExpectedAggregate(
            text=row["text"],
            model=None if row["model"] == "-" else row["model"],
            tqs_mean=float(row["tqs_mean"]),
            tqs_sd=float(row["tqs_sd"]),
            critical_total=int(row["critical_total"]),
        )
        for row in _read_csv(path, ("text", "model", "tqs_mean", "tqs_sd", "critical_total"))
    )
    path = roles["expected_severity"]
    expected_severity = {
        row["text"]: SeverityCounts(
            int(row["neutral"]), int(row["minor"]), int(row["major"]), int(row["critical"])
        )
        for row in _read_csv(path, ("text", "neutral", "minor", "major", "critical"))
    }

    # --- cross-table consistency ---
    mqm_by_key = {r.key: r for r in mqm_rows}
    grouped_known: dict[tuple[str, int], list[str]] = {}
    for m in metric_rows:
        canonical = mqm_by_key[m.key]
        if m.tqs != canonical.tqs:
            known = known_cells.get(m.key)
            if known and known.tqs_s1 == m.tqs and known.tqs_s2 == canonical.tqs:
                grouped_known.setdefault((m.key[0], m.key[1]), []).append(
                    f"{m.key[2]} {m.tqs} vs {canonical.tqs}"
                )
            else:
                msg = (
                    f"unexplained TQS disagreement at {m.key}: metric table {m.tqs} "
                    f"vs canonical {canonical.tqs}"
                )
                if strict:
                    raise DiscrepancyError(msg)
                warnings.append(msg + " (canonical value used)")
    for (text, passage), cells in sorted(grouped_known.items()):
        warnings.append(
            f"known TQS discrepancy at {text} passage {passage}: "
            + "; ".join(cells)
            + " (canonical table wins)"
        )

    mqm_rows.sort(key=lambda r: r.key)
    metric_rows.sort(key=lambda r: r.key)
    rarity_rows.sort(key=lambda r: r.key)
    return Dataset(
        mqm=tuple(mqm_rows),
        metrics=tuple(metric_rows),
        rarity=tuple(rarity_rows),
        known_discrepancies=discrepancies,
        expected_aggregates=expected_aggregates,
        expected_severity=expected_severity,
        provenance=provenance,
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationDiff:
    where: str
    stored: str
    recomputed: str


@dataclass(frozen=True)
class VerificationReport:
    diffs: tuple[VerificationDiff, ...]
    checks_run: tuple[str, ...]
    notes: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.diffs


def verify_fixtures(dataset: Dataset) -> VerificationReport:
    """Recompute derivable quantities and diff them against stored values.

    Covers: scheme-1 ratings from stored TQS, per-model and per-text TQS
    means/SDs and critical totals against the expected-aggregate reference,
    severity totals per text, and the display-rounded rarity ratio columns.
    Known cross-table discrepancies are reported as notes, not diffs.
    """
    diffs: list[VerificationDiff] = []
    checks: list[str] = []
    notes = [
        f"known discrepancy sidecar: {len(dataset.known_discrepancies)} cells "
        f"across {len({(d.text, d.passage) for d in dataset.known_discrepancies})} passages"
    ]

    checks.append("scheme-1 rating recomputation from stored TQS (all rows)")
    for row in dataset.mqm:
        recomputed = rate_scheme1(row.tqs)
        if recomputed is not row.rating:
            diffs.append(
                VerificationDiff(
                    where=f"rating at {row.key}",
                    stored=row.rating.value,
                    recomputed=recomputed.value,
                )
            )

    # mean/SD tolerances match the published tables' own internal precision:
    # the stored values were rounded from unrounded source data, so recomputation
    # from the row fixtures can differ by up to half a display unit
    checks.append("TQS means (±0.05) / SDs (±0.1) and exact critical totals vs expected aggregates")
    for exp in dataset.expected_aggregates:
        rows = [
            r
            for r in dataset.mqm
            if r.text == exp.text and (exp.model is None or r.model == exp.model)
        ]
        label = f"{exp.text}/{exp.model or 'Aggregate'}"
        if not rows:
            diffs.append(VerificationDiff(f"aggregate {label}", "rows expected", "no rows"))
            continue
        mean = sum(r.tqs for r in rows) / len(rows)
        sd = sample_sd([r.tqs for r in rows])
        crit = sum(r.counts.critical for r in rows)
        if abs(mean - exp.tqs_mean) > 0.05 + 1e-9:
            diffs.append(VerificationDiff(f"TQS mean {label}", str(exp.tqs_mean), f"{mean:.3f}"))
        if abs(sd - exp.tqs_sd) > 0.1 + 1e-9:
            diffs.append(VerificationDiff(f"TQS SD {label}", str(exp.tqs_sd), f"{sd:.3f}"))
        if crit != exp.critical_total:
            diffs.append(
                VerificationDiff(f"critical count {label}", str(exp.critical_total), str(crit))
            )

    checks.append("severity totals per text vs expected severity table")
    for text, expected in dataset.expected_severity.items():
        total = SeverityCounts()
        for r in dataset.mqm:
            if r.text == text:
                total = total + r.counts
        if total != expected:
            diffs.append(
                VerificationDiff(
                    f"severity totals {text}",
                    f"{expected.neutral}/{expected.minor}/{expected.major}/{expected.critical}",
                    f"{total.neutral}/{total.minor}/{total.major}/{total.critical}",
                )
            )

    # the printed percentage columns carry up to ~0.06pp of source rounding
    # noise against the exact integer ratios; one display unit of slack keeps
    # this check about transcription errors, not publication rounding habits
    checks.append("rarity ratio display columns vs exact rare/terms fractions (±0.1pp)")
    for row in dataset.rarity:
        for printed, exact, name in (
            (row.rare_ratio_pct, 100 * row.rare_ratio, "rare ratio"),
            (row.nf_ratio_pct, 100 * row.nf_ratio, "not-found ratio"),
        ):
            if abs(printed - exact) > 0.1 + 1e-9:
                diffs.append(
                    VerificationDiff(
                        f"{name} at {row.key}", f"{printed}%", f"{exact:.2f}%"
                    )
                )

    return VerificationReport(diffs=tuple(diffs), checks_run=tuple(checks), notes=tuple(notes))


# ---------------------------------------------------------------------------
# Joins for the statistical analyses
# ---------------------------------------------------------------------------

def metric_series(dataset: Dataset, column: str, text: Optional[str] = None) -> PairedSeries:
    """Pair an automated-metric column with canonical TQS per translation."""
    mqm_by_key = dataset.mqm_by_key()
    labels, xs, ys = [], [], []
    missing = []
    for m in dataset.metrics:
        if text is not None and m.text != text:
            continue
        if m.key not in mqm_by_key:
            missing.append(m.key)
            continue
        labels.append(f"{m.text}:{m.passage}:{m.model}")
        xs.append(m.value(column))
        ys.append(mqm_by_key[m.key].tqs)
    if missing:
        raise DataError(f"metric rows with no MQM join: {missing}")
    if not xs:
        raise DataError(f"no metric rows for text={text!r}")
    return PairedSeries.from_values(xs, ys, labels)


def passage_mean_tqs(dataset: Dataset) -> dict[tuple[str, int], float]:
    """Passage-level TQS: arithmetic mean of the models' TQS per passage."""
    sums: dict[tuple[str, int], list[float]] = {}
    for r in dataset.mqm:
        sums.setdefault((r.text, r.passage), []).append(r.tqs)
    return {k: sum(v) / len(v) for k, v in sorted(sums.items())}


def passage_critical_totals(dataset: Dataset) -> dict[tuple[str, int], int]:
    totals: dict[tuple[str, int], int] = {}
    for r in dataset.mqm:
        totals[(r.text, r.passage)] = totals.get((r.text, r.passage), 0) + r.counts.critical
    return dict(sorted(totals.items()))


RARITY_PREDICTORS = ("rare_ratio", "nf_ratio", "avg_zipf")


def rarity_series(
    dataset: Dataset,
    predictor: str,
    outcome: str = "tqs",
    text: Optional[str] = None,
    exclude_passages: Sequence[int] = (),
) -> PairedSeries:
    """Pair a rarity predictor with passage-level mean TQS or critical totals."""
    if predictor not in RARITY_PREDICTORS:
        raise DataError(f"unknown predictor {predictor!r}; expected one of {RARITY_PREDICTORS}")
    outcomes = passage_mean_tqs(dataset) if outcome == "tqs" else passage_critical_totals(dataset)
    labels, xs, ys = [], [], []
    for row in dataset.rarity:
        if text is not None and row.text != text:
            continue
        if row.passage in exclude_passages:
            continue
        if row.key not in outcomes:
            raise DataError(f"rarity row with no MQM join: {row.key}")
        labels.append(f"{row.text}:{row.passage}")
        xs.append(getattr(row, predictor))
        ys.append(float(outcomes[row.key]))
    if not xs:
        raise DataError(f"no rarity rows for text={text!r}")
    return PairedSeries.from_values(xs, ys, labels)


# ---------------------------------------------------------------------------
# Serialization (lossless round trip)
# ---------------------------------------------------------------------------

def dataset_to_json(dataset: Dataset) -> str:
    payload = {
        "provenance": dataset.provenance,
        "warnings": list(dataset.warnings),
        "mqm": [
            {
                "text": r.text, "passage": r.passage, "model": r.model, "tqs": r.tqs,
                "rating": r.rating.value,
                "counts": [r.counts.neutral, r.counts.minor, r.counts.major, r.counts.critical],
            }
            for r in dataset.mqm
        ],
        "metrics": [
            {
                "text": r.text, "passage": r.passage, "model": r.model, "tqs": r.tqs,
                "bleu4": r.bleu4, "bertscore": r.bertscore, "comet": r.comet,
                "rating": r.rating.value,
            }
            for r in dataset.metrics
        ],
        "rarity": [
            {
                "text": r.text, "passage": r.passage, "terms": r.terms,
                "avg_zipf": r.avg_zipf, "rare": r.rare, "not_found": r.not_found,
                "rare_ratio_pct": r.rare_ratio_pct, "nf_ratio_pct": r.nf_ratio_pct,
            }
            for r in dataset.rarity
        ],
        "known_discrepancies": [
            {"text": d.text, "passage": d.passage, "model": d.model,
             "tqs_s1": d.tqs_s1, "tqs_s2": d.tqs_s2}
            for d in dataset.known_discrepancies
        ],
        "expected_aggregates": [
            {"text": e.text, "model": e.model, "tqs_mean": e.tqs_mean,
             "tqs_sd": e.tqs_sd, "critical_total": e.critical_total}
            for e in dataset.expected_aggregates
        ],
        "expected_severity": {
            t: [c.neutral, c.minor, c.major, c.critical]
            for t, c in dataset.expected_severity.items()
        },
    }
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2)


def dataset_from_json(text: str) -> Dataset:
    payload = json.loads(text)
    return Dataset(
        mqm=tuple(
            MqmRow(
                text=r["text"], passage=r["passage"], model=r["model"], tqs=r["tqs"],
                rating=Rating(r["rating"]), counts=SeverityCounts(*r["counts"]),
            )
            for r in payload["mqm"]
        ),
        metrics=tuple(
            MetricRow(
                text=r["text"], passage=r["passage"], model=r["model"], tqs=r["tqs"],
                bleu4=r["bleu4"], bertscore=r["bertscore"], comet=r["comet"],
                rating=Rating(r["rating"]),
            )
            for r in payload["metrics"]
        ),
        rarity=tuple(
            RarityRow(
                text=r["text"], passage=r["passage"], terms=r["terms"],
                avg_zipf=r["avg_zipf"], rare=r["rare"], not_found=r["not_found"],
                rare_ratio_pct=r["rare_ratio_pct"], nf_ratio_pct=r["nf_ratio_pct"],
            )
            for r in payload["rarity"]
        ),
        known_discrepancies=tuple(
            KnownDiscrepancy(**d) for d in payload["known_discrepancies"]
        ),
        expected_aggregates=tuple(
            ExpectedAggregate(**e) for e in payload["expected_aggregates"]
        ),
        expected_severity={
            t: SeverityCounts(*c) for t, c in payload["expected_severity"].items()
        },
        provenance=payload["provenance"],
        warnings=tuple(payload["warnings"]),
    )
