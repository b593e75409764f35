import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from philoscope.corpus import LemmaStream, build_index
from philoscope.errors import DataError
from philoscope.rarity import (
    DEFAULT_BANDS,
    PassageLemmas,
    Risk,
    RiskBands,
    profile,
    profiles_to_csv,
    read_passages_jsonl,
    risk_flag,
)


@pytest.fixture
def index_159():
    # counts α:100, β:49, γ:10 — 159 tokens total
    lemmas = ["α"] * 100 + ["β"] * 49 + ["γ"] * 10
    return build_index(LemmaStream.from_documents([("d", [(l, l) for l in lemmas])]))


def passage(*lemmas, text="T", pid="1"):
    return PassageLemmas.from_raw(text, pid, list(lemmas))


def test_profile_hand_example(index_159):
    p = profile(passage("α", "α", "β", "δ"), index_159)
    assert p.term_count == 4
    assert p.rare_count == 2  # β below 50, δ absent
    assert p.rare_ratio == 0.5
    assert p.not_found_count == 1
    assert p.nf_ratio == 0.25
    z_alpha = 11 - math.log10(159)          # count 100 of 159
    z_beta = math.log10(49e9 / 159)         # count 49 of 159
    assert p.avg_zipf == pytest.approx((2 * z_alpha + z_beta + 0.0) / 4, abs=1e-12)
    assert round(p.avg_zipf, 3) == 6.522


def test_profile_all_frequent(index_159):
    p = profile(passage("α", "α", "α"), index_159)
    assert p.rare_ratio == 0.0
    assert p.nf_ratio == 0.0
    assert p.risk is Risk.LOW


def test_risk_flag_paper_points():
    assert risk_flag(0.153) is Risk.LOW
    assert risk_flag(0.25) is Risk.ELEVATED
    assert risk_flag(0.434) is Risk.CRITICAL


def test_risk_flag_band_edges():
    assert risk_flag(0.1999999) is Risk.LOW
    assert risk_flag(0.20) is Risk.ELEVATED
    assert risk_flag(0.30) is Risk.ELEVATED
    assert risk_flag(0.3000001) is Risk.CRITICAL


def test_risk_flag_out_of_range():
    with pytest.raises(DataError):
        risk_flag(-0.01)
    with pytest.raises(DataError):
        risk_flag(1.01)


def test_risk_flag_custom_bands():
    bands = RiskBands(0.10, 0.50)
    assert risk_flag(0.15, bands) is Risk.ELEVATED
    assert risk_flag(0.50, bands) is Risk.ELEVATED
    assert risk_flag(0.51, bands) is Risk.CRITICAL
    with pytest.raises(DataError):
        RiskBands(0.5, 0.2)


@given(st.floats(min_value=0.0, max_value=1.0))
def test_risk_flag_monotone(ratio):
    order = [Risk.LOW, Risk.ELEVATED, Risk.CRITICAL]
    below = risk_flag(max(0.0, ratio - 0.05))
    at = risk_flag(ratio)
    assert order.index(below) <= order.index(at)


def test_profile_permutation_invariant(index_159):
    lemmas = ["α", "β", "δ", "γ", "α", "ε"]
    shuffled = lemmas[:]
    random.Random(7).shuffle(shuffled)
    a = profile(passage(*lemmas), index_159)
    b = profile(passage(*shuffled), index_159)
    assert (a.avg_zipf, a.rare_count, a.not_found_count) == (b.avg_zipf, b.rare_count, b.not_found_count)


def test_replacing_found_with_absent_never_helps(index_159):
    base = ["α", "α", "β", "γ"]
    swapped = ["α", "α", "β", "ζ"]  # γ (found) -> ζ (absent)
    a = profile(passage(*base), index_159)
    b = profile(passage(*swapped), index_159)
    assert b.avg_zipf <= a.avg_zipf
    assert b.rare_ratio >= a.rare_ratio
    assert b.nf_ratio >= a.nf_ratio


def test_zero_threshold_makes_rare_equal_not_found(index_159):
    p = profile(passage("α", "β", "δ", "δ"), index_159, rare_threshold=0)
    assert p.rare_count == p.not_found_count == 2


def test_strict_threshold_boundary():
    # a lemma with frequency exactly 50 is not rare; 49 is
    lemmas = ["x"] * 50 + ["y"] * 49 + ["z"]
    index = build_index(LemmaStream.from_documents([("d", [(l, l) for l in lemmas])]))
    p = profile(passage("x", "y"), index)
    assert p.rare_count == 1


def test_unique_lemma_mode(index_159):
    p = profile(passage("α", "α", "β"), index_159, unique_lemmas=True)
    assert p.term_count == 2
    assert p.rare_count == 1


def test_empty_passage_rejected():
    with pytest.raises(DataError):
        PassageLemmas.from_raw("T", "1", [])


def test_profiles_csv_column_order(index_159):
    text = profiles_to_csv([profile(passage("α", "β"), index_159)])
    header = text.splitlines()[0]
    assert header.startswith("Text,Ch.,Terms,Avg. Zipf,Rare Ratio,Rare,Not Found,NF Ratio")


def test_read_passages_jsonl(tmp_path):
    path = tmp_path / "passages.jsonl"
    path.write_text(
        '{"text_id": "Mix", "passage_id": "1", "lemmas": ["ὁ", "ἀνήρ"]}\n',
        encoding="utf-8",
    )
    passages = read_passages_jsonl(path)
    assert passages[0].lemmas == ("ὁ", "ἀνήρ")
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"text_id": "Mix"}\n', encoding="utf-8")
    with pytest.raises(DataError, match="bad.jsonl:1"):
        read_passages_jsonl(bad)


def test_default_bands_pinned():
    assert DEFAULT_BANDS.low_upper == 0.20
    assert DEFAULT_BANDS.critical_lower == 0.30
