"""Report tables over a loaded dataset, rendered as Markdown or CSV.

Every numeric cell records the operation and inputs that produced it, so a
rendered value can be traced back (the CLI exposes this as --explain). Output
is deterministic: two runs over the same inputs and spec are byte-identical,
and every table header echoes the fixture version, exclusions, and pinned
parameters in effect.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from . import dataset as ds
from .errors import DataError
from .mqm import (
    ExclusionFilter,
    Rating,
    aggregate,
    stratify,
)
from .rarity import DEFAULT_BANDS, RiskBands, risk_flag
from .stats import cohens_d, pearson, significance_stars, spearman
from .util import round_half_up

logger = logging.getLogger("philoscope.report")

TABLE_IDS = ("T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8", "S3", "S4", "S6")

# Metric columns present per translation in the fixture set; the others are
# aggregate-only in the source tables and cannot enter correlation analyses.
AVAILABLE_METRICS = (("BLEU-4", "bleu4"), ("BERTScore", "bertscore"), ("COMET", "comet"))
UNAVAILABLE_METRICS = ("chrF++", "METEOR", "ROUGE-L", "BLEURT")

DEFAULT_STRATA: tuple[tuple[str, str], ...] = (
    ("Comp (all passages)", ""),
    ("Comp (excl. 8, 10)", "Comp:8,Comp:10"),
    ("Comp (excl. 3, 8, 10)", "Comp:3,Comp:8,Comp:10"),
    ("Comp (excl. 8, 10, and ChatGPT on 3)", "Comp:8,Comp:10,Comp:3:ChatGPT"),
)


@dataclass(frozen=True)
class Cell:
    value: str
    provenance: str


@dataclass
class Table:
    table_id: str
    title: str
    columns: tuple[str, ...]
    rows: list[tuple[str, dict[str, Cell]]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, row_label: str, cells: dict[str, Cell]) -> None:
        self.rows.append((row_label, cells))

    def cell(self, row_label: str, column: str) -> Cell:
        for label, cells in self.rows:
            if label == row_label and column in cells:
                return cells[column]
        raise DataError(f"{self.table_id}: no cell at row {row_label!r}, column {column!r}")


@dataclass(frozen=True)
class ReportSpec:
    tables: tuple[str, ...] = ()
    fmt: str = "markdown"
    exclusions: ExclusionFilter = ExclusionFilter()
    options: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        unknown = [t for t in self.tables if t not in TABLE_IDS]
        if unknown:
            raise DataError(f"unknown table ids {unknown}; valid: {', '.join(TABLE_IDS)}")
        if self.fmt not in ("markdown", "csv"):
            raise DataError(f"unknown format {self.fmt!r}")


def _f1(x: float) -> str:
    return f"{round_half_up(x, 1):.1f}"


def _pct(x: float) -> str:
    return _f1(x) + "%"


def _r2dp(r: float, stars: str = "") -> str:
    return f"{r:+.2f}{stars}"


def _ci(lo: float, hi: float) -> str:
    return f"[{lo:.2f}, {hi:.2f}]"


def _fmt_p(p: float) -> str:
    return "< .001" if p < 0.001 else f"{round_half_up(p, 3):.3f}"


# ---------------------------------------------------------------------------
# Table builders
# ---------------------------------------------------------------------------

def _model_rows(texts: Sequence[str]) -> list[tuple[str, Optional[str]]]:
    rows = []
    for t in texts:
        for m in ds.MODELS:
            rows.append((t, m))
        rows.append((t, None))
    return rows


def _t1(data: ds.Dataset) -> Table:
    table = Table("T1", "Aggregate automated metric scores (mean ± SD)", ("n",) + tuple(name for name, _ in AVAILABLE_METRICS))
    from .mqm import sample_sd  # local import to keep module top uncluttered

    for text, model in _model_rows(ds.TEXTS):
        rows = [r for r in data.metrics if r.text == text and (model is None or r.model == model)]
        label = f"{text}/{model or 'Aggregate'}"
        cells = {"n": Cell(str(len(rows)), f"count of metric rows in {label}")}
        for name, col in AVAILABLE_METRICS:
            values = [r.value(col) for r in rows]
            mean = sum(values) / len(values)
            cells[name] = Cell(
                f"{_f1(mean)} (± {_f1(sample_sd(values))})",
                f"mean/sample SD of {col} over {len(values)} metric-table rows [{label}]",
            )
        table.add(label, cells)
    table.notes.append(
        "Scores on the 0-100 scale of the metric fixture table. "
        f"Not per-translation in the fixture set, hence omitted: {', '.join(UNAVAILABLE_METRICS)}."
    )
    return table


def _t2(data: ds.Dataset, exclusions: ExclusionFilter) -> Table:
    report = aggregate(data.scored(), exclusions=exclusions, baseline_text="Mix")
    texts = [t for t in ds.TEXTS if (t, None) in report.groups]
    table = Table("T2", "Aggregate TQS by text and model", ("TQS Mean", "TQS SD", "Critical Errors", "n"))
    for text, model in _model_rows(texts):
        stats = report.groups.get((text, model))
        if stats is None:
            continue
        label = f"{text}/{model or 'Aggregate'}"
        src = f"mqm.aggregate over {stats.n} records [{label}; exclusions: {exclusions.label}]"
        table.add(
            label,
            {
                "TQS Mean": Cell(_f1(stats.mean_tqs), f"mean TQS; {src}"),
                "TQS SD": Cell(_f1(stats.sd_tqs), f"sample SD of TQS; {src}"),
                "Critical Errors": Cell(str(stats.critical_total), f"sum of critical counts; {src}"),
                "n": Cell(str(stats.n), src),
            },
        )
    return table


def _strata(exclusions: ExclusionFilter) -> list[tuple[str, ExclusionFilter]]:
    strata = [(label, ExclusionFilter.parse(spec)) for label, spec in DEFAULT_STRATA]
    if exclusions.entries and exclusions.entries not in [e.entries for _, e in strata]:
        strata.append((f"Comp (custom: excl. {exclusions.label})", exclusions))
    return strata


def _t3(data: ds.Dataset, exclusions: ExclusionFilter) -> Table:
    table = Table("T3", "TQS stratified by passage exclusion", ("Mean TQS", "SD", "Gap vs Mix", "n"))
    scored = data.scored()
    mix = aggregate(scored, baseline_text="Mix").groups[("Mix", None)]
    table.add(
        "Mix (all passages)",
        {
            "Mean TQS": Cell(_f1(mix.mean_tqs), "mean TQS over all Mix records; op mqm.aggregate"),
            "SD": Cell(_f1(mix.sd_tqs), "sample SD over all Mix records; op mqm.aggregate"),
            "Gap vs Mix": Cell("—", "baseline row"),
            "n": Cell(str(mix.n), "count of Mix records"),
        },
    )
    for stratum in stratify(scored, _strata(exclusions), target_text="Comp", baseline_text="Mix"):
        src = f"mqm.stratify [exclusions: {stratum.exclusions.label}]"
        table.add(
            stratum.label,
            {
                "Mean TQS": Cell(_f1(stratum.mean_tqs), f"mean TQS over {stratum.n} Comp records; {src}"),
                "SD": Cell(_f1(stratum.sd_tqs), f"sample SD; {src}"),
                "Gap vs Mix": Cell(
                    _f1(stratum.gap),
                    f"Comp mean minus Mix mean (computed unrounded); {src}",
                ),
                "n": Cell(str(stratum.n), src),
            },
        )
    table.notes.append("Gap = Comp mean TQS minus Mix mean TQS; Mix keeps all passages in every row.")
    return table


def _t4(data: ds.Dataset) -> Table:
    table = Table(
        "T4",
        "Correlations between automated metrics and TQS (all translations)",
        ("Pearson r [95% CI]", "p", "Spearman rho [95% CI]", "p (rho)"),
    )
    for name, col in AVAILABLE_METRICS:
        series = ds.metric_series(data, col)
        pe = pearson(series)
        sp = spearman(series)
        src = f"stats on metric column {col} vs canonical TQS, n={series.n}"
        table.add(
            name,
            {
                "Pearson r [95% CI]": Cell(
                    f"{_r2dp(pe.r, significance_stars(pe.p_two_tailed))} {_ci(pe.ci_low, pe.ci_high)}",
                    f"stats.pearson with Fisher-z CI; {src}",
                ),
                "p": Cell(_fmt_p(pe.p_two_tailed), f"two-tailed t-transform p; {src}"),
                "Spearman rho [95% CI]": Cell(
                    f"{_r2dp(sp.r, significance_stars(sp.p_two_tailed))} {_ci(sp.ci_low, sp.ci_high)}",
                    f"stats.spearman, Fisher-z CI on rho (approximate); {src}",
                ),
                "p (rho)": Cell(_fmt_p(sp.p_two_tailed), f"two-tailed t-transform p on rho; {src}"),
            },
        )
    notice = (
        "Metrics without per-translation fixture values are excluded: "
        + ", ".join(UNAVAILABLE_METRICS)
    )
    logger.info(notice)
    table.notes.append(notice)
    table.notes.append("* p < .05, ** p < .01, *** p < .001. Spearman CIs are Fisher-z approximations.")
    return table


def _t5(data: ds.Dataset, exclusions: ExclusionFilter) -> Table:
    report = aggregate(data.scored(), exclusions=exclusions, baseline_text="Mix")
    columns = (
        "S1 High Pass", "S1 Low Pass", "S1 Fail",
        "S2 High Pass", "S2 Low Pass", "S2 Fail",
    )
    table = Table("T5", "Quality ratings by text and model", columns)
    texts = [t for t in ds.TEXTS if (t, None) in report.groups]
    for text, model in _model_rows(texts):
        stats = report.groups.get((text, model))
        if stats is None:
            continue
        label = f"{text}/{model or 'Aggregate'}"
        cells = {}
        for scheme in (1, 2):
            for rating in (Rating.HIGH_PASS, Rating.LOW_PASS, Rating.FAIL):
                col = f"S{scheme} {rating.label}"
                cells[col] = Cell(
                    _pct(stats.rating_pct(scheme, rating)),
                    f"scheme-{scheme} {rating.label} share of {stats.n} records "
                    f"[{label}; exclusions: {exclusions.label}]; op mqm.aggregate",
                )
        table.add(label, cells)
    table.notes.append(
        "Scheme 1: High Pass >= 95, Low Pass 87-94, Fail < 87. "
        "Scheme 2 demotes any record with >= 1 Critical error to Fail."
    )
    return table


def _t6(data: ds.Dataset) -> Table:
    table = Table("T6", "Error typology distribution by text", ("Mix", "Comp", "Comp/Mix Ratio"))
    totals = {}
    for text in ds.TEXTS:
        rows = [r for r in data.mqm if r.text == text]
        sev = rows[0].counts.__class__()
        for r in rows:
            sev = sev + r.counts
        totals[text] = (sev, len(rows))
    mix_sev, mix_n = totals["Mix"]
    comp_sev, comp_n = totals["Comp"]

    def count_row(label: str, mix_val: float, comp_val: float, fmt=lambda v: str(v), src: str = "") -> None:
        ratio = comp_val / mix_val if mix_val else None
        table.add(
            label,
            {
                "Mix": Cell(fmt(mix_val), f"{src} [Mix]"),
                "Comp": Cell(fmt(comp_val), f"{src} [Comp]"),
                "Comp/Mix Ratio": Cell(
                    f"{round_half_up(ratio, 1):.1f}x" if ratio is not None else "—",
                    f"ratio of raw values; {src}",
                ),
            },
        )

    count_row("Total errors", mix_sev.total, comp_sev.total, src="sum of severity counts")
    count_row(
        "Errors per translation",
        mix_sev.total / mix_n,
        comp_sev.total / comp_n,
        fmt=_f1,
        src="total errors / record count",
    )
    for sev_name in ("neutral", "minor", "major", "critical"):
        m = getattr(mix_sev, sev_name)
        c = getattr(comp_sev, sev_name)
        m_pct = round_half_up(100.0 * m / mix_sev.total, 1)
        c_pct = round_half_up(100.0 * c / comp_sev.total, 1)
        ratio = c_pct / m_pct if m_pct else None
        table.add(
            f"Severity: {sev_name.capitalize()}",
            {
                "Mix": Cell(f"{m} ({m_pct:.1f}%)", f"{sev_name} count and share of {mix_sev.total} Mix errors"),
                "Comp": Cell(f"{c} ({c_pct:.1f}%)", f"{sev_name} count and share of {comp_sev.total} Comp errors"),
                "Comp/Mix Ratio": Cell(
                    f"{round_half_up(ratio, 1):.1f}x" if ratio is not None else "—",
                    "ratio of the rounded percentage shares",
                ),
            },
        )
    table.notes.append(
        "Type and subtype rows require per-error annotations (CSV input to the score command); "
        "the bundled fixture set carries severity totals only."
    )
    return table


def _t7(data: ds.Dataset) -> Table:
    table = Table(
        "T7",
        "Correlations between terminology rarity and translation quality",
        ("TQS (Comp)", "TQS (All)", "Critical (Comp)", "Critical (All)"),
    )
    predictors = (
        ("Rare term ratio", "rare_ratio"),
        ("Not-found ratio", "nf_ratio"),
        ("Average Zipf frequency", "avg_zipf"),
    )
    cols = (
        ("TQS (Comp)", "tqs", "Comp"),
        ("TQS (All)", "tqs", None),
        ("Critical (Comp)", "critical", "Comp"),
        ("Critical (All)", "critical", None),
    )
    for label, predictor in predictors:
        cells = {}
        for col_label, outcome, text in cols:
            series = ds.rarity_series(data, predictor, outcome=outcome, text=text)
            res = pearson(series)
            cells[col_label] = Cell(
                _r2dp(res.r, significance_stars(res.p_two_tailed)),
                f"stats.pearson of {predictor} vs passage-level "
                f"{'mean TQS' if outcome == 'tqs' else 'critical totals'}, "
                f"n={series.n} passages [{text or 'all texts'}]",
            )
        table.add(label, cells)
    table.notes.append(
        "Passage-level TQS = mean of the models' TQS per passage. Ratios are exact "
        "fractions (rare/terms, not-found/terms). * p < .05, ** p < .01, *** p < .001."
    )
    return table


def _t8(data: ds.Dataset) -> Table:
    table = Table(
        "T8",
        "Metric-vs-TQS correlations by text",
        ("Mix (n=30)", "Comp (n=30)", "Combined (n=60)"),
    )
    for name, col in AVAILABLE_METRICS:
        cells = {}
        for col_label, text in (("Mix (n=30)", "Mix"), ("Comp (n=30)", "Comp"), ("Combined (n=60)", None)):
            series = ds.metric_series(data, col, text=text)
            res = pearson(series)
            cells[col_label] = Cell(
                _r2dp(res.r, significance_stars(res.p_two_tailed)),
                f"stats.pearson of {col} vs canonical TQS, n={series.n} [{text or 'combined'}]",
            )
        table.add(name, cells)
    notice = (
        "Metrics without per-translation fixture values are excluded: "
        + ", ".join(UNAVAILABLE_METRICS)
    )
    logger.info(notice)
    table.notes.append(notice)
    return table


def _s3(data: ds.Dataset) -> Table:
    table = Table(
        "S3",
        "Mix-to-Comp gap on automated metrics, stratified",
        ("All passages", "Excl. 8, 10", "Excl. 3, 8, 10", "Cohen's d (all)"),
    )
    strata = (
        ("All passages", ()),
        ("Excl. 8, 10", (8, 10)),
        ("Excl. 3, 8, 10", (3, 8, 10)),
    )
    for name, col in AVAILABLE_METRICS:
        mix_vals = [r.value(col) for r in data.metrics if r.text == "Mix"]
        mix_mean = sum(mix_vals) / len(mix_vals)
        cells = {}
        for col_label, excluded in strata:
            comp_vals = [
                r.value(col)
                for r in data.metrics
                if r.text == "Comp" and r.passage not in excluded
            ]
            comp_mean = sum(comp_vals) / len(comp_vals)
            drop = 100.0 * (comp_mean - mix_mean) / mix_mean
            cells[col_label] = Cell(
                _pct(drop),
                f"relative drop (Comp mean - Mix mean)/Mix mean of {col}; "
                f"Comp n={len(comp_vals)}, Mix n={len(mix_vals)}",
            )
        comp_all = [r.value(col) for r in data.metrics if r.text == "Comp"]
        cells["Cohen's d (all)"] = Cell(
            f"{cohens_d(mix_vals, comp_all):.2f}",
            f"stats.cohens_d of Mix vs Comp {col} vectors (30 each)",
        )
        table.add(name, cells)
    table.notes.append(
        "Computed from the per-translation metric fixture columns; metrics carried only "
        "as aggregates in the source data are omitted."
    )
    return table


def _s4(data: ds.Dataset, exclusions: ExclusionFilter) -> Table:
    table = Table(
        "S4",
        "Pass rates under stratification",
        ("Scheme 1 Pass Rate", "Scheme 2 Pass Rate", "Scheme 1 Gap", "Scheme 2 Gap"),
    )
    scored = data.scored()
    mix = aggregate(scored, baseline_text="Mix").groups[("Mix", None)]
    table.add(
        "Mix (all passages)",
        {
            "Scheme 1 Pass Rate": Cell(_pct(mix.pass_rate(1)), "HP+LP share of all Mix records"),
            "Scheme 2 Pass Rate": Cell(_pct(mix.pass_rate(2)), "gated HP+LP share of all Mix records"),
            "Scheme 1 Gap": Cell("—", "baseline row"),
            "Scheme 2 Gap": Cell("—", "baseline row"),
        },
    )
    for stratum in stratify(scored, _strata(exclusions)[:3], target_text="Comp", baseline_text="Mix"):
        src = f"mqm.stratify [exclusions: {stratum.exclusions.label}]"
        table.add(
            stratum.label,
            {
                "Scheme 1 Pass Rate": Cell(_pct(stratum.pass_rate_scheme1), f"HP+LP share of {stratum.n} Comp records; {src}"),
                "Scheme 2 Pass Rate": Cell(_pct(stratum.pass_rate_scheme2), f"gated HP+LP share; {src}"),
                "Scheme 1 Gap": Cell(
                    _f1(stratum.pass_gap_scheme1), f"Mix rate minus Comp rate, computed unrounded; {src}"
                ),
                "Scheme 2 Gap": Cell(
                    _f1(stratum.pass_gap_scheme2), f"Mix rate minus Comp rate, computed unrounded; {src}"
                ),
            },
        )
    table.notes.append("Pass rate = High Pass + Low Pass. Mix keeps all passages in every row.")
    return table


def _s6(data: ds.Dataset, bands: RiskBands) -> Table:
    table = Table(
        "S6",
        "Terminology rarity by passage",
        ("Terms", "Avg. Zipf", "Rare Ratio", "Rare", "Not Found", "NF Ratio", "Risk"),
    )
    for row in data.rarity:
        label = f"{row.text}/{row.passage}"
        flag = risk_flag(row.rare_ratio, bands)
        table.add(
            label,
            {
                "Terms": Cell(str(row.terms), f"token lemma count [{label}]"),
                "Avg. Zipf": Cell(f"{row.avg_zipf:.2f}", f"mean Zipf over lemmas, absent = 0 [{label}]"),
                "Rare Ratio": Cell(_pct(100 * row.rare_ratio), f"rare/terms = {row.rare}/{row.terms} [{label}]"),
                "Rare": Cell(str(row.rare), f"lemmas with corpus frequency < 50 or absent [{label}]"),
                "Not Found": Cell(str(row.not_found), f"lemmas absent from corpus [{label}]"),
                "NF Ratio": Cell(_pct(100 * row.nf_ratio), f"not_found/terms = {row.not_found}/{row.terms} [{label}]"),
                "Risk": Cell(
                    flag.value,
                    f"rarity.risk_flag(rare_ratio, bands low<{bands.low_upper}, critical>{bands.critical_lower})",
                ),
            },
        )
    for text in ds.TEXTS:
        rows = [r for r in data.rarity if r.text == text]
        table.add(
            f"{text}/Mean",
            {
                "Terms": Cell("—", "mean row"),
                "Avg. Zipf": Cell(f"{sum(r.avg_zipf for r in rows) / len(rows):.2f}", f"mean of per-passage Zipf means [{text}]"),
                "Rare Ratio": Cell(_pct(100 * sum(r.rare_ratio for r in rows) / len(rows)), f"mean of exact per-passage rare ratios [{text}]"),
                "Rare": Cell("—", "mean row"),
                "Not Found": Cell("—", "mean row"),
                "NF Ratio": Cell(_pct(100 * sum(r.nf_ratio for r in rows) / len(rows)), f"mean of exact per-passage not-found ratios [{text}]"),
                "Risk": Cell("—", "mean row"),
            },
        )
    return table


# ---------------------------------------------------------------------------
# Assembly and rendering
# ---------------------------------------------------------------------------

def build_tables(spec: ReportSpec, data: ds.Dataset) -> list[Table]:
    bands = DEFAULT_BANDS
    if "risk_bands" in spec.options:
        low, critical = (float(v) for v in str(spec.options["risk_bands"]).split(","))
        bands = RiskBands(low, critical)
    builders = {
        "T1": lambda: _t1(data),
        "T2": lambda: _t2(data, spec.exclusions),
        "T3": lambda: _t3(data, spec.exclusions),
        "T4": lambda: _t4(data),
        "T5": lambda: _t5(data, spec.exclusions),
        "T6": lambda: _t6(data),
        "T7": lambda: _t7(data),
        "T8": lambda: _t8(data),
        "S3": lambda: _s3(data),
        "S4": lambda: _s4(data, spec.exclusions),
        "S6": lambda: _s6(data, bands),
    }
    return [builders[tid]() for tid in spec.tables]


def _header_lines(spec: ReportSpec, data: ds.Dataset) -> list[str]:
    opts = "; ".join(f"{k}={v}" for k, v in sorted(spec.options.items())) or "defaults"
    return [
        f"fixtures: {data.provenance}",
        f"exclusions: {spec.exclusions.label}",
        f"parameters: {opts}",
    ]


def render_markdown(tables: Sequence[Table], spec: ReportSpec, data: ds.Dataset) -> str:
    lines: list[str] = []
    for meta in _header_lines(spec, data):
        lines.append(f"> {meta}")
    lines.append("")
    for table in tables:
        lines.append(f"## {table.table_id}. {table.title}")
        lines.append("")
        lines.append("| | " + " | ".join(table.columns) + " |")
        lines.append("|---" * (len(table.columns) + 1) + "|")
        for label, cells in table.rows:
            values = [cells[c].value if c in cells else "" for c in table.columns]
            lines.append(f"| {label} | " + " | ".join(values) + " |")
        for note in table.notes:
            lines.append("")
            lines.append(f"*{note}*")
        lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


def render_csv(tables: Sequence[Table], spec: ReportSpec, data: ds.Dataset) -> str:
    def q(value: str) -> str:
        if any(ch in value for ch in ',"\n'):
            return '"' + value.replace('"', '""') + '"'
        return value

    lines: list[str] = []
    for meta in _header_lines(spec, data):
        lines.append(f"# {meta}")
    for table in tables:
        lines.append(f"# {table.table_id}: {table.title}")
        lines.append(",".join([q("row")] + [q(c) for c in table.columns]))
        for label, cells in table.rows:
            values = [cells[c].value if c in cells else "" for c in table.columns]
            lines.append(",".join([q(label)] + [q(v) for v in values]))
        for note in table.notes:
            lines.append(f"# note: {note}")
    return "\n".join(lines) + "\n"


def run(spec: ReportSpec, data: ds.Dataset) -> str:
    """Render the requested tables. An empty table list renders an empty report."""
    tables = build_tables(spec, data)
    if not tables:
        return ""
    if spec.fmt == "csv":
        return render_csv(tables, spec, data)
    return render_markdown(tables, spec, data)


def explain(spec: ReportSpec, data: ds.Dataset, address: str) -> str:
    """Resolve 'TABLE:row label:column' to the provenance of that cell."""
    parts = address.split(":", 2)
    if len(parts) != 3:
        raise DataError("cell address must be TABLE:ROW:COLUMN, e.g. T2:Mix/Claude:TQS Mean")
    table_id, row_label, column = (p.strip() for p in parts)
    if table_id not in TABLE_IDS:
        raise DataError(f"unknown table id {table_id!r}")
    effective = spec if table_id in spec.tables else ReportSpec(
        tables=(table_id,), fmt=spec.fmt, exclusions=spec.exclusions, options=spec.options
    )
    table = next(t for t in build_tables(effective, data) if t.table_id == table_id)
    cell = table.cell(row_label, column)
    return f"{table_id}:{row_label}:{column} = {cell.value}\n  produced by: {cell.provenance}"
