import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from philoscope.errors import DataError, MetricError
from philoscope.lexmetrics import (
    Metric,
    MetricScore,
    Provenance,
    Segment,
    best_reference,
    bleu4,
    chrf_pp,
    lcs_length,
    rouge_l,
    score_pairs_csv,
    tokenize,
)


def seg(text):
    return Segment.from_text(text)


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------

def brute_force_lcs(a, b):
    """Exhaustive LCS by subsequence enumeration (no dynamic programming)."""
    shorter, longer = (a, b) if len(a) <= len(b) else (b, a)
    best = 0
    for mask in range(1 << len(shorter)):
        candidate = [shorter[i] for i in range(len(shorter)) if mask & (1 << i)]
        if len(candidate) <= best:
            continue
        it = iter(longer)
        if all(tok in it for tok in candidate):
            best = len(candidate)
    return best


def enumerate_ngrams(items, n):
    return Counter(tuple(items[i : i + n]) for i in range(len(items) - n + 1))


def chrf_oracle(hyp, ref, char_order=6, word_order=2, beta=2.0):
    """Hand enumeration of the chrF++ definition over explicit multisets."""
    ps, rs = [], []
    sides = [(hyp.chars, ref.chars, char_order), (hyp.tokens, ref.tokens, word_order)]
    for hyp_items, ref_items, max_n in sides:
        for n in range(1, max_n + 1):
            h = enumerate_ngrams(hyp_items, n)
            r = enumerate_ngrams(ref_items, n)
            if not h and not r:
                continue
            overlap = sum((h & r).values())
            ps.append(overlap / sum(h.values()) if h else 0.0)
            rs.append(overlap / sum(r.values()) if r else 0.0)
    p = sum(ps) / len(ps)
    r = sum(rs) / len(rs)
    if beta * beta * p + r == 0:
        return 0.0
    return (1 + beta * beta) * p * r / (beta * beta * p + r)


# ---------------------------------------------------------------------------
# Tokenizer / segments
# ---------------------------------------------------------------------------

def test_tokenize_splits_and_peels_punctuation():
    assert tokenize("The cat, (the dog).") == ("the", "cat", ",", "(", "the", "dog", ")", ".")


def test_tokenize_deterministic_and_lowercases():
    text = "Περὶ Κράσεων — on mixtures!"
    assert tokenize(text) == tokenize(text)
    assert all(t == t.lower() for t in tokenize(text))


def test_segment_chars_exclude_whitespace():
    s = seg("ab cd\te")
    assert s.chars == "abcde"


# ---------------------------------------------------------------------------
# BLEU-4
# ---------------------------------------------------------------------------

def test_bleu_identity_is_one():
    s = seg("the physician mixes the remedy carefully")
    assert bleu4(s, [s]) == pytest.approx(1.0, abs=1e-12)
    assert bleu4(s, [s], smoothing="add1") == pytest.approx(1.0, abs=1e-12)


def test_bleu_add1_never_reaches_one_on_partial_overlap():
    value = bleu4(seg("a b c d e"), [seg("a b c d f")], smoothing="add1")
    assert 0.0 < value < 1.0


def test_bleu_no_common_fourgram_unsmoothed_zero():
    hyp = seg("alpha beta gamma delta")
    ref = seg("alpha beta epsilon zeta")  # shares a bigram but no 4-gram
    assert bleu4(hyp, [ref]) == 0.0


def test_bleu_smoothing_hand_computation():
    # "the cat sat" vs "the dog sat": p1 = 2/3 unsmoothed;
    # bigrams 0/2 -> (0+1)/(2+1); trigrams 0/1 -> (0+1)/(1+1); no 4-grams.
    expected = (2 / 3 * 1 / 3 * 1 / 2) ** (1 / 3)
    assert bleu4(seg("the cat sat"), [seg("the dog sat")], smoothing="add1") == pytest.approx(
        expected, abs=1e-12
    )


def test_bleu_clipping_uses_per_reference_maximum():
    hyp = seg("the the the")
    ref = seg("the cat")
    # clip: "the" appears once in the reference -> matches min(3, 1) = 1, p1 = 1/3
    assert bleu4(hyp, [ref], smoothing="add1") == pytest.approx(
        ((1 / 3) * (1 / 3) * (1 / 2)) ** (1 / 3), abs=1e-12
    )
    # a second reference with "the the" raises the clip to 2
    ref2 = seg("the the")
    assert bleu4(hyp, [ref, ref2], smoothing="add1") > bleu4(hyp, [ref], smoothing="add1")


def test_bleu_brevity_reference_tie_prefers_shorter():
    hyp = seg("a b c d")
    ref_short = seg("a b c")        # |3-4| = 1
    ref_long = seg("a b c d e")     # |5-4| = 1 -> tie, shorter wins, BP = 1
    both = bleu4(hyp, [ref_short, ref_long], smoothing="add1")
    # identical clipped counts, so the only difference vs a long-only run is BP
    long_only = bleu4(hyp, [ref_long], smoothing="add1")
    assert both > long_only
    assert math.isclose(long_only / both, math.exp(1 - 5 / 4), rel_tol=1e-9)


def test_bleu_brevity_penalty_applies_to_short_hypothesis():
    hyp = seg("a b c d")
    ref = seg("a b c d e f g w")
    assert bleu4(hyp, [ref], smoothing="add1") == pytest.approx(
        math.exp(1 - 8 / 4) * bleu4(hyp, [seg("a b c d")], smoothing="add1"), rel=1e-9
    )


def test_bleu_short_hypothesis_uses_effective_orders():
    # 2-token identity pair: only orders 1-2 exist; geometric mean over them
    s = seg("black bile")
    assert bleu4(s, [s]) == pytest.approx(1.0, abs=1e-12)


def test_bleu_rejects_empty_inputs_and_bad_mode():
    with pytest.raises(MetricError):
        bleu4(seg(""), [seg("a")])
    with pytest.raises(MetricError):
        bleu4(seg("a"), [])
    with pytest.raises(MetricError):
        bleu4(seg("a"), [seg("")])
    with pytest.raises(MetricError):
        bleu4(seg("a"), [seg("a")], smoothing="laplace")


@settings(max_examples=200)
@given(
    st.lists(st.sampled_from("abcde"), min_size=1, max_size=10),
    st.lists(st.lists(st.sampled_from("abcde"), min_size=4, max_size=4), min_size=1, max_size=3),
    st.sampled_from(["none", "add1"]),
)
def test_bleu_multi_reference_dominates_equal_length_singles(hyp_tokens, refs_tokens, mode):
    hyp = Segment(tuple(hyp_tokens), "".join(hyp_tokens))
    refs = [Segment(tuple(r), "".join(r)) for r in refs_tokens]
    multi = bleu4(hyp, refs, smoothing=mode)
    assert 0.0 <= multi <= 1.0
    for ref in refs:
        assert multi >= bleu4(hyp, [ref], smoothing=mode) - 1e-12


# ---------------------------------------------------------------------------
# chrF++
# ---------------------------------------------------------------------------

def test_chrf_identity_is_one():
    s = seg("humours and mixtures")
    assert chrf_pp(s, [s]) == pytest.approx(1.0, abs=1e-12)


def test_chrf_disjoint_alphabets_zero():
    assert chrf_pp(seg("abc abd"), [seg("xyz wyz")]) == 0.0


def test_chrf_hand_enumeration_abcd_abce():
    hyp, ref = seg("abcd"), seg("abce")
    # char orders: 1: 3/4, 2: 2/3, 3: 1/2, 4: 0; orders 5-6 unpopulated;
    # word order 1: 0/1; word order 2 unpopulated -> avgP = avgR = 23/60
    assert chrf_pp(hyp, [ref]) == pytest.approx(23 / 60, abs=1e-12)
    assert chrf_pp(hyp, [ref]) == pytest.approx(chrf_oracle(hyp, ref), abs=1e-12)


@settings(max_examples=100)
@given(
    st.text(alphabet="abcd ", min_size=1, max_size=20).filter(str.strip),
    st.lists(st.text(alphabet="abcd ", min_size=1, max_size=20).filter(str.strip), min_size=1, max_size=3),
)
def test_chrf_matches_enumeration_oracle_and_max_rule(hyp_text, ref_texts):
    hyp = seg(hyp_text)
    refs = [seg(t) for t in ref_texts]
    expected_each = [chrf_oracle(hyp, r) for r in refs]
    assert chrf_pp(hyp, refs) == pytest.approx(max(expected_each), abs=1e-12)


# ---------------------------------------------------------------------------
# ROUGE-L
# ---------------------------------------------------------------------------

def test_rouge_identity_and_disjoint():
    s = seg("a b c d")
    assert rouge_l(s, [s]) == 1.0
    assert rouge_l(seg("a b"), [seg("x y")]) == 0.0


def test_rouge_hand_example():
    assert rouge_l(seg("a b c"), [seg("a c b")]) == pytest.approx(2 / 3, abs=1e-12)


def test_rouge_multi_reference_is_max():
    hyp = seg("a b c d")
    refs = [seg("a x y z"), seg("a b c z")]
    assert rouge_l(hyp, refs) == max(rouge_l(hyp, [r]) for r in refs)


@settings(max_examples=150)
@given(
    st.lists(st.sampled_from("abc"), min_size=0, max_size=8),
    st.lists(st.sampled_from("abc"), min_size=0, max_size=8),
)
def test_lcs_matches_brute_force(a, b):
    assert lcs_length(a, b) == brute_force_lcs(a, b)


# ---------------------------------------------------------------------------
# best_reference / score records
# ---------------------------------------------------------------------------

def test_best_reference_max_and_tie_rule():
    assert best_reference({"J": 0.30, "S": 0.25}) == ("J", 0.30)
    assert best_reference({"S": 0.30, "J": 0.30}) == ("J", 0.30)
    with pytest.raises(MetricError):
        best_reference({})


def test_reference_preference_counts_shape():
    # 30 synthetic comparisons per metric: preference counts must sum to 30
    rng = random.Random(11)
    for metric in ("bleu", "chrf", "rouge"):
        prefs = Counter()
        for _ in range(30):
            scores = {"J": rng.random(), "S": rng.random()}
            prefs[best_reference(scores)[0]] += 1
        assert prefs["J"] + prefs["S"] == 30


def test_metric_score_validation():
    MetricScore(Metric.BLEU4, 0.5, provenance=Provenance.NATIVE)
    MetricScore(Metric.COMET, 0.5, reference_id="J", provenance=Provenance.INGESTED)
    with pytest.raises(DataError):
        MetricScore(Metric.COMET, 0.5, provenance=Provenance.NATIVE)
    with pytest.raises(DataError):
        MetricScore(Metric.BLEU4, 1.5)


# ---------------------------------------------------------------------------
# batch scoring
# ---------------------------------------------------------------------------

def test_read_ingested_scores(tmp_path):
    from philoscope.lexmetrics import read_ingested_scores

    path = tmp_path / "ingested.csv"
    path.write_text(
        "text,passage,model,metric,reference_id,value\n"
        "Mix,1,Claude,BERTScore,J,0.929\n"
        "Mix,1,Claude,COMET,,0.826\n",
        encoding="utf-8",
    )
    rows = read_ingested_scores(path)
    assert rows[0][0] == ("Mix", 1, "Claude")
    assert rows[0][1].metric is Metric.BERTSCORE
    assert rows[0][1].reference_id == "J"
    assert rows[1][1].reference_id is None
    assert all(score.provenance is Provenance.INGESTED for _, score in rows)
    bad = tmp_path / "bad.csv"
    bad.write_text(
        "text,passage,model,metric,reference_id,value\nMix,1,Claude,WER,,0.5\n",
        encoding="utf-8",
    )
    with pytest.raises(DataError, match="unknown metric"):
        read_ingested_scores(bad)
    out_of_range = tmp_path / "range.csv"
    out_of_range.write_text(
        "text,passage,model,metric,reference_id,value\nMix,1,Claude,COMET,,82.6\n",
        encoding="utf-8",
    )
    with pytest.raises(DataError, match="outside"):
        read_ingested_scores(out_of_range)


def test_score_pairs_csv(tmp_path):
    (tmp_path / "hyp.txt").write_text("the mixture is hot and dry", encoding="utf-8")
    (tmp_path / "ref1.txt").write_text("the mixture is hot and dry", encoding="utf-8")
    (tmp_path / "ref2.txt").write_text("the compound is warm and arid", encoding="utf-8")
    pairs = tmp_path / "pairs.csv"
    pairs.write_text(
        "text,passage,model,hypothesis_path,reference_paths\n"
        "Mix,1,Claude,hyp.txt,ref1.txt;ref2.txt\n",
        encoding="utf-8",
    )
    rows = score_pairs_csv(pairs, smoothing="add1")
    assert rows[0]["bleu4"] == pytest.approx(1.0)
    assert rows[0]["rouge_l"] == pytest.approx(1.0)
    assert rows[0]["smoothing"] == "add1"
    missing = tmp_path / "missing.csv"
    missing.write_text(
        "text,passage,model,hypothesis_path,reference_paths\nMix,1,C,nope.txt,ref1.txt\n",
        encoding="utf-8",
    )
    with pytest.raises(DataError):
        score_pairs_csv(missing)
