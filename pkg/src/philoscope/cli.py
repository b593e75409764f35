"""Command-line front end.

Subcommands: index-corpus, profile, score, metrics, correlate, report, verify.
Global flags --format/--seed/--strict apply across subcommands; an optional
config file of 'key = value' lines mirrors every flag, with explicit flags
winning. Exit codes: 0 success, 1 input error, 2 verification diff under
--strict.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import dataset as ds
from . import report as rpt
from .corpus import build_index, read_index, read_stream_jsonl, read_stream_tsv, write_index
from .errors import DataError, DiscrepancyError, PhiloscopeError
from .lexmetrics import pairs_results_to_csv, score_pairs_csv
from .mqm import (
    ExclusionFilter,
    aggregate,
    error_typology,
    read_annotations_csv,
    scored_from_records,
)
from .rarity import (
    DEFAULT_BANDS,
    RARE_THRESHOLD_DEFAULT,
    RiskBands,
    profile,
    profiles_to_csv,
    read_passages_jsonl,
)
from .stats import pearson, simple_regression, spearman
from .util import round_half_up

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_VERIFICATION_DIFF = 2

# config keys that must be coerced before reaching handlers
_CONFIG_TYPES = {
    "seed": int,
    "strict": lambda v: v.lower() in ("1", "true", "yes"),
    "rare_threshold": int,
    "bootstrap": int,
    "unique_lemmas": lambda v: v.lower() in ("1", "true", "yes"),
    "by_text": lambda v: v.lower() in ("1", "true", "yes"),
}


def read_config(path: str | Path) -> dict:
    """Parse 'key = value' lines; '#' starts a comment; keys use flag names
    with dashes or underscores."""
    values: dict = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key in _CONFIG_TYPES:
            try:
                value = _CONFIG_TYPES[key](value)
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
        values[key] = value
    return values


def _write_or_print(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_bands(spec: str) -> RiskBands:
    try:
        low, critical = (float(v) for v in spec.split(","))
    except ValueError as exc:
        raise DataError(f"--risk-bands expects LOW,CRITICAL (e.g. 0.20,0.30): {spec!r}") from exc
    return RiskBands(low, critical)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def cmd_index_corpus(args) -> int:
    paths = [Path(p) for p in getattr(args, "in")]
    tsv_inputs = [p for p in paths if p.suffix == ".tsv"]
    jsonl_inputs = [p for p in paths if p.suffix != ".tsv"]
    documents = []
    if jsonl_inputs:
        documents.extend(read_stream_jsonl(jsonl_inputs).documents)
    if tsv_inputs:
        documents.extend(read_stream_tsv(tsv_inputs).documents)
    from .corpus import LemmaStream

    stream = LemmaStream.from_documents(documents)
    index = build_index(stream, source_label=";".join(p.name for p in paths))
    write_index(index, args.out)
    print(
        f"indexed {len(stream.documents)} documents, {index.total_tokens} tokens, "
        f"{len(index.counts)} distinct lemmas -> {args.out}"
    )
    return EXIT_OK


def cmd_profile(args) -> int:
    index = read_index(args.index)
    passages = read_passages_jsonl(args.passages)
    bands = _parse_bands(args.risk_bands) if args.risk_bands else DEFAULT_BANDS
    profiles = [
        profile(p, index, rare_threshold=args.rare_threshold, bands=bands,
                unique_lemmas=args.unique_lemmas)
        for p in passages
    ]
    _write_or_print(profiles_to_csv(profiles), args.out)
    return EXIT_OK


def cmd_score(args) -> int:
    records = read_annotations_csv(args.annotations)
    scored = scored_from_records(records)
    exclusions = ExclusionFilter.parse(args.exclude) if args.exclude else ExclusionFilter()
    schemes = (1, 2) if args.scheme == "both" else (int(args.scheme),)

    lines = ["text,passage,model,word_count,neutral,minor,major,critical,tqs"
             + "".join(f",rating_scheme{s}" for s in schemes)]
    by_key = {r.key: r for r in records}
    kept = [s for s in scored if not exclusions.excludes(s.text_id, s.passage_id, s.model)]
    if not kept:
        raise DataError(f"no records left after exclusions [{exclusions.label}]")
    for s in sorted(kept, key=lambda r: r.key):
        rec = by_key[s.key]
        row = (
            f"{s.text_id},{s.passage_id},{s.model},{rec.word_count},"
            f"{s.counts.neutral},{s.counts.minor},{s.counts.major},{s.counts.critical},"
            f"{round_half_up(s.tqs, 1):.1f}"
        )
        if 1 in schemes:
            row += f",{s.rating_scheme1.value}"
        if 2 in schemes:
            row += f",{s.rating_scheme2.value}"
        lines.append(row)

    report = aggregate(kept, baseline_text=None)
    lines.append("")
    lines.append("# aggregate: text,model,n,tqs_mean,tqs_sd,critical_total")
    for (text, model), stats in report.groups.items():
        lines.append(
            f"# {text},{model or 'Aggregate'},{stats.n},"
            f"{round_half_up(stats.mean_tqs, 1):.1f},{round_half_up(stats.sd_tqs, 1):.1f},"
            f"{stats.critical_total}"
        )
    typology = error_typology(records)
    if any(typology.by_type[t][et] for t in typology.texts for et in typology.by_type[t]):
        lines.append("# typology: text,terminology,accuracy")
        for t in typology.texts:
            by_type = typology.by_type[t]
            terminology = sum(c for et, c in by_type.items() if et.value == "Terminology")
            accuracy = sum(c for et, c in by_type.items() if et.value == "Accuracy")
            lines.append(f"# {t},{terminology},{accuracy}")
    _write_or_print("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_metrics(args) -> int:
    rows = score_pairs_csv(args.pairs, smoothing=args.smoothing)
    _write_or_print(pairs_results_to_csv(rows), args.out)
    return EXIT_OK


def cmd_correlate(args) -> int:
    paths = {}
    if args.mqm:
        paths["mqm"] = args.mqm
    if args.metrics:
        paths["metrics"] = args.metrics
    if args.rarity:
        paths["rarity"] = args.rarity
    data = ds.load(paths or None, strict=args.strict)
    if args.bootstrap and args.seed is None:
        raise DataError("--bootstrap requires an explicit --seed")

    tables = ["T4"]
    if args.by_text:
        tables.append("T8")
    tables.append("T7")
    options = {}
    if args.bootstrap:
        options = {"bootstrap": str(args.bootstrap), "seed": str(args.seed)}
    spec = rpt.ReportSpec(tables=tuple(tables), fmt=args.format, options=options)
    out = [rpt.run(spec, data).rstrip("\n")]

    # rarity regression diagnostics on the Comp passages
    series = ds.rarity_series(data, "rare_ratio", outcome="tqs", text="Comp")
    bootstrap = (args.bootstrap, args.seed) if args.bootstrap else None
    reg = simple_regression(series, bootstrap=bootstrap)
    pe = pearson(series)
    sp = spearman(series)
    diag = [
        "",
        "## Rarity regression diagnostics (Comp passages, rare ratio vs mean TQS)",
        "",
        f"- slope {reg.slope:.2f}, intercept {reg.intercept:.2f}, R^2 {reg.r_squared:.3f}",
        f"- Pearson r {pe.r:+.3f} (p {pe.p_two_tailed:.4g}), Spearman rho {sp.r:+.3f} (p {sp.p_two_tailed:.4g}, CI approximate)",
        f"- Cook's distance threshold 4/n = {reg.influence_threshold:.2f}",
    ]
    for label, d in zip(series.labels, reg.cooks_d):
        flag = "  <- influential" if d > reg.influence_threshold else ""
        diag.append(f"  - {label}: D = {d:.3f}{flag}")
    if reg.bootstrap_ci:
        lo, hi = reg.bootstrap_ci
        diag.append(
            f"- bootstrap 95% CI for R^2: [{lo:.3f}, {hi:.3f}] "
            f"({args.bootstrap} resamples, seed {args.seed}; percentile method)"
        )
    influential = [
        lbl for lbl, d in zip(series.labels, reg.cooks_d) if d > reg.influence_threshold
    ]
    if influential:
        excluded = [int(lbl.split(":")[1]) for lbl in influential]
        refit_series = ds.rarity_series(data, "rare_ratio", outcome="tqs", text="Comp",
                                        exclude_passages=excluded)
        refit = simple_regression(refit_series)
        refit_p = pearson(refit_series)
        diag.append(
            f"- refit without influential passages {sorted(excluded)}: "
            f"r {refit_p.r:+.3f} (p {refit_p.p_two_tailed:.4f}), R^2 {refit.r_squared:.3f}"
        )
    out.append("\n".join(diag))
    _write_or_print("\n".join(out) + "\n", args.out)
    return EXIT_OK


def cmd_report(args) -> int:
    data = ds.load(strict=args.strict)
    for warning in data.warnings:
        logging.getLogger("philoscope").warning(warning)
    exclusions = ExclusionFilter.parse(args.exclude) if args.exclude else ExclusionFilter()
    table_ids = ()
    if args.tables:
        raw = args.tables.strip()
        table_ids = tuple(rpt.TABLE_IDS) if raw.lower() == "all" else tuple(
            t.strip() for t in raw.split(",") if t.strip()
        )
    options = {}
    if args.seed is not None:
        options["seed"] = str(args.seed)
    spec = rpt.ReportSpec(tables=table_ids, fmt=args.format, exclusions=exclusions, options=options)
    if args.explain:
        print(rpt.explain(spec, data, args.explain))
        return EXIT_OK
    _write_or_print(rpt.run(spec, data), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    data = ds.load(strict=args.strict)
    for warning in data.warnings:
        print(f"warning: {warning}")
    report = ds.verify_fixtures(data)
    for check in report.checks_run:
        print(f"check: {check}")
    for note in report.notes:
        print(f"note: {note}")
    if report.ok:
        print("verification: OK (zero unexplained diffs)")
        return EXIT_OK
    for diff in report.diffs:
        print(f"diff: {diff.where}: stored {diff.stored}, recomputed {diff.recomputed}")
    print(f"verification: {len(report.diffs)} diff(s) found")
    return EXIT_VERIFICATION_DIFF if args.strict else EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted both before and after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file mirroring flags; flags override")
    common.add_argument("--format", choices=("markdown", "csv"), default="markdown",
                        help="report output format")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomized procedures (required by --bootstrap)")
    common.add_argument("--strict", action="store_true",
                        help="treat unexplained fixture disagreements as failures")

    parser = argparse.ArgumentParser(
        prog="philoscope",
        parents=[common],
        description="Translation quality scoring, terminology-rarity risk profiling, "
        "lexical MT metrics, and the statistical analyses over the bundled fixtures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = {}

    def add_parser(name: str, **kwargs):
        p = sub.add_parser(name, parents=[common], **kwargs)
        parser.subcommands[name] = p
        return p

    p = add_parser("index-corpus", help="build a lemma-frequency index from corpus files")
    p.add_argument("--in", nargs="+", required=True,
                   help="corpus files (JSON Lines; .tsv files use the TSV token format)")
    p.add_argument("--out", required=True, help="output index TSV")
    p.set_defaults(handler=cmd_index_corpus)

    p = add_parser("profile", help="rarity-profile passages against an index")
    p.add_argument("--index", required=True)
    p.add_argument("--passages", required=True, help="JSON Lines passage lemma file")
    p.add_argument("--rare-threshold", type=int, default=RARE_THRESHOLD_DEFAULT,
                   help="corpus frequency below which a lemma is rare (strict <)")
    p.add_argument("--risk-bands", default=None, help="LOW,CRITICAL cut points (default 0.20,0.30)")
    p.add_argument("--unique-lemmas", action="store_true",
                   help="count unique lemmas instead of tokens (sensitivity mode)")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_profile)

    p = add_parser("score", help="score annotated translations (TQS + ratings)")
    p.add_argument("--annotations", required=True)
    p.add_argument("--exclude", default=None, help="e.g. Comp:8,Comp:10 or Comp:3:ChatGPT")
    p.add_argument("--scheme", choices=("1", "2", "both"), default="both")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_score)

    p = add_parser("metrics", help="compute BLEU-4 / chrF++ / ROUGE-L for hypothesis files")
    p.add_argument("--pairs", required=True,
                   help="CSV: text,passage,model,hypothesis_path,reference_paths (';'-separated)")
    p.add_argument("--smoothing", choices=("none", "add1"), default="none")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_metrics)

    p = add_parser("correlate", help="metric/TQS and rarity/TQS correlation analyses")
    p.add_argument("--mqm", default=None, help="override the MQM fixture CSV")
    p.add_argument("--metrics", default=None, help="override the metric fixture CSV")
    p.add_argument("--rarity", default=None, help="override the rarity fixture CSV")
    p.add_argument("--by-text", action="store_true", help="add per-text correlation table")
    p.add_argument("--bootstrap", type=int, default=None, metavar="B",
                   help="bootstrap resamples for the R^2 CI (requires --seed)")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_correlate)

    p = add_parser("report", help="render report tables from the fixture dataset")
    p.add_argument("--tables", default="",
                   help=f"comma list from {{{','.join(rpt.TABLE_IDS)}}} or 'all' (empty -> empty report)")
    p.add_argument("--exclude", default=None)
    p.add_argument("--explain", default=None, metavar="CELL",
                   help="print the provenance of one cell: TABLE:ROW:COLUMN")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_report)

    p = add_parser("verify", help="recompute derivable fixture quantities and diff them")
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s", stream=sys.stderr)
    parser = build_parser()
    args, _ = parser.parse_known_args(argv)
    if args.config:
        try:
            config = read_config(args.config)
            known = {a.dest for p in [parser, *parser.subcommands.values()] for a in p._actions}
            unknown = set(config) - known
            if unknown:
                raise DataError(f"{args.config}: unknown config keys {sorted(unknown)}")
        except (PhiloscopeError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        # subcommands parse into a fresh namespace, so defaults must land on
        # the active subparser as well as the top-level parser
        parser.set_defaults(**config)
        for name, subparser in parser.subcommands.items():
            if name == args.command:
                subparser.set_defaults(**config)
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except DiscrepancyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION_DIFF
    except PhiloscopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
