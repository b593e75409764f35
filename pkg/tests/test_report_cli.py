import json
import shutil

import pytest

from philoscope import report as rpt
from philoscope.cli import main, read_config
from philoscope.dataset import FIXTURE_FILES, fixture_dir, load
from philoscope.errors import DataError
from philoscope.mqm import ExclusionFilter


@pytest.fixture(scope="module")
def data():
    return load()


def run_cli(*argv):
    return main(list(argv))


def test_t5_pass_rates(data):
    spec = rpt.ReportSpec(tables=("T5",))
    text = rpt.run(spec, data)
    assert "| Comp/Aggregate | 30.0% | 33.3% | 36.7% | 30.0% | 13.3% | 56.7% |" in text


def test_t3_gap_row_with_exclusions(data):
    spec = rpt.ReportSpec(tables=("T3",), exclusions=ExclusionFilter.parse("Comp:8,Comp:10"))
    text = rpt.run(spec, data)
    assert "| Comp (excl. 8, 10) | 91.4 | 7.5 | -3.8 | 24 |" in text


def test_empty_spec_renders_empty_report(data):
    assert rpt.run(rpt.ReportSpec(tables=()), data) == ""


def test_unknown_table_rejected():
    with pytest.raises(DataError):
        rpt.ReportSpec(tables=("T9",))


def test_report_deterministic(data):
    spec = rpt.ReportSpec(tables=("T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8", "S3", "S4", "S6"))
    assert rpt.run(spec, data) == rpt.run(spec, data)


def test_csv_format(data):
    spec = rpt.ReportSpec(tables=("T2",), fmt="csv")
    text = rpt.run(spec, data)
    assert text.startswith("# fixtures:")
    assert "Mix/Aggregate,95.2,4.8,5,30" in text


def test_every_cell_has_provenance(data):
    spec = rpt.ReportSpec(tables=rpt.TABLE_IDS)
    for table in rpt.build_tables(spec, data):
        for label, cells in table.rows:
            for column, cell in cells.items():
                assert cell.provenance, f"{table.table_id}:{label}:{column}"


def test_explain_cell(data):
    spec = rpt.ReportSpec(tables=("T2",))
    out = rpt.explain(spec, data, "T2:Mix/Claude:TQS Mean")
    assert "96.2" in out
    assert "mean TQS" in out
    # explain reaches tables not in the requested set as well
    out2 = rpt.explain(spec, data, "T7:Rare term ratio:TQS (Comp)")
    assert "-0.97" in out2
    with pytest.raises(DataError):
        rpt.explain(spec, data, "T2:nowhere:TQS Mean")
    with pytest.raises(DataError):
        rpt.explain(spec, data, "bad-address")


def test_s6_risk_column(data):
    text = rpt.run(rpt.ReportSpec(tables=("S6",)), data)
    assert "| Comp/8 | 232 | 3.84 | 39.7% | 92 | 69 | 29.7% | Critical |" in text
    assert "| Mix/1 | 216 | 5.55 | 15.3% | 33 | 27 | 12.5% | Low |" in text


def test_t6_severity_rows(data):
    text = rpt.run(rpt.ReportSpec(tables=("T6",)), data)
    assert "| Severity: Critical | 5 (2.9%) | 57 (21.5%) | 7.4x |" in text
    assert "| Total errors | 170 | 265 | 1.6x |" in text


# ---------------------------------------------------------------------------
# CLI end-to-end
# ---------------------------------------------------------------------------

def test_cli_report_writes_file(tmp_path, capsys):
    out = tmp_path / "report.md"
    assert run_cli("report", "--tables", "T5", "--out", str(out)) == 0
    assert "36.7%" in out.read_text(encoding="utf-8")


def test_cli_report_empty_tables_ok(capsys):
    assert run_cli("report", "--tables", "") == 0
    assert capsys.readouterr().out == ""


def test_cli_report_byte_identical(tmp_path):
    a, b = tmp_path / "a.md", tmp_path / "b.md"
    run_cli("report", "--tables", "all", "--out", str(a))
    run_cli("report", "--tables", "all", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_cli_explain(capsys):
    assert run_cli("report", "--explain", "T5:Comp/Aggregate:S1 Fail") == 0
    out = capsys.readouterr().out
    assert "36.7%" in out
    assert "produced by" in out


def test_cli_unknown_table_is_input_error(capsys):
    assert run_cli("report", "--tables", "T99") == 1


def test_cli_verify_ok(capsys):
    assert run_cli("verify") == 0
    assert "zero unexplained diffs" in capsys.readouterr().out


def test_cli_strict_verification_diff_exit_code(tmp_path, capsys):
    src = fixture_dir()
    work = tmp_path / "fx"
    work.mkdir()
    for name in FIXTURE_FILES.values():
        shutil.copy(src / name, work / name)
    metrics = work / FIXTURE_FILES["metrics"]
    metrics.write_text(
        metrics.read_text(encoding="utf-8").replace("Comp,6,Claude,97.9", "Comp,6,Claude,97.0"),
        encoding="utf-8",
    )
    code = run_cli("correlate", "--strict", "--metrics", str(metrics))
    assert code == 2


def test_cli_index_and_profile_pipeline(tmp_path, capsys):
    corpus = tmp_path / "corpus.jsonl"
    docs = []
    for d, lemmas in (("d1", ["ὁ"] * 60 + ["ἀνήρ"] * 49 + ["λόγος"]), ("d2", ["ὁ"] * 40)):
        docs.append(json.dumps({"doc_id": d, "tokens": [{"surface": l, "lemma": l} for l in lemmas]}, ensure_ascii=False))
    corpus.write_text("\n".join(docs) + "\n", encoding="utf-8")
    index_path = tmp_path / "index.tsv"
    assert run_cli("index-corpus", "--in", str(corpus), "--out", str(index_path)) == 0
    assert index_path.read_text(encoding="utf-8").startswith("#total\t150")

    passages = tmp_path / "passages.jsonl"
    passages.write_text(
        json.dumps({"text_id": "T", "passage_id": "1", "lemmas": ["ὁ", "ἀνήρ", "ξένος"]}, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    out = tmp_path / "profiles.csv"
    assert run_cli("profile", "--index", str(index_path), "--passages", str(passages), "--out", str(out)) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("Text,Ch.,Terms")
    # 2 of 3 lemmas rare-or-absent -> ratio 66.7%, critical risk
    assert "66.7%" in lines[1]
    assert lines[1].endswith("Critical")


def test_cli_metrics_command(tmp_path):
    (tmp_path / "h.txt").write_text("wound healing plaster", encoding="utf-8")
    (tmp_path / "r.txt").write_text("wound healing plaster", encoding="utf-8")
    pairs = tmp_path / "pairs.csv"
    pairs.write_text(
        "text,passage,model,hypothesis_path,reference_paths\nComp,1,Claude,h.txt,r.txt\n",
        encoding="utf-8",
    )
    out = tmp_path / "scores.csv"
    assert run_cli("metrics", "--pairs", str(pairs), "--smoothing", "add1", "--out", str(out)) == 0
    content = out.read_text(encoding="utf-8")
    assert "1.000000,1.000000,1.000000,add1" in content


def test_cli_score_command(tmp_path):
    annotations = tmp_path / "ann.csv"
    annotations.write_text(
        "text,passage,model,word_count,error_type,subtype,severity,note\n"
        "Mix,1,Claude,100,Accuracy,Omission,Critical,\n"
        "Mix,2,Claude,100,,,,\n"
        "Comp,8,Claude,100,Accuracy,Addition,Minor,\n",
        encoding="utf-8",
    )
    out = tmp_path / "scores.csv"
    assert run_cli("score", "--annotations", str(annotations), "--exclude", "Comp:8", "--out", str(out)) == 0
    content = out.read_text(encoding="utf-8")
    assert "Mix,1,Claude,100,0,0,0,1,75.0,F,F" in content
    assert "Comp,8" not in content.split("# aggregate")[0]


def test_cli_score_missing_annotations_is_input_error():
    assert run_cli("score", "--annotations", "/nonexistent/ann.csv") == 1


def test_cli_correlate_requires_seed_for_bootstrap(capsys):
    assert run_cli("correlate", "--bootstrap", "100") == 1
    assert "--seed" in capsys.readouterr().err


def test_cli_correlate_diagnostics(tmp_path):
    out = tmp_path / "corr.md"
    assert run_cli("correlate", "--by-text", "--bootstrap", "200", "--seed", "42", "--out", str(out)) == 0
    text = out.read_text(encoding="utf-8")
    assert "Cook's distance threshold 4/n = 0.40" in text
    assert "Comp:8: D = 1.495  <- influential" in text
    assert "Comp:10: D = 2.030  <- influential" in text
    assert "refit without influential passages [8, 10]" in text
    assert "seed 42" in text


def test_config_file_defaults_and_flag_override(tmp_path, capsys):
    config = tmp_path / "philoscope.conf"
    config.write_text("# defaults\ntables = T5\nformat = csv\n", encoding="utf-8")
    assert run_cli("report", "--config", str(config)) == 0
    out = capsys.readouterr().out
    assert out.startswith("# fixtures:")  # csv format from config
    assert "36.7%" in out
    # explicit flag beats the config value
    assert run_cli("report", "--config", str(config), "--format", "markdown") == 0
    assert "| Comp/Aggregate |" in capsys.readouterr().out


def test_read_config_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("this is not a key value line\n", encoding="utf-8")
    with pytest.raises(DataError):
        read_config(bad)
