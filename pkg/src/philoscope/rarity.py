"""Per-passage terminology-rarity profiling and translation-risk flagging.

A passage is profiled against a FrequencyIndex: mean Zipf frequency over its
token lemmas (absent lemmas contribute 0), the share of rare lemmas (corpus
frequency strictly below a threshold, or absent), and the share of lemmas
absent from the corpus. The rare-term ratio drives a three-band risk flag.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import FrequencyIndex
from .errors import DataError
from .util import nfc, round_half_up

RARE_THRESHOLD_DEFAULT = 50


class Risk(enum.Enum):
    LOW = "Low"
    ELEVATED = "Elevated"
    CRITICAL = "Critical"


@dataclass(frozen=True)
class RiskBands:
    """Rare-ratio cut points: Low below `low_upper`, Critical above `critical_lower`,
    Elevated on the closed band in between."""

    low_upper: float = 0.20
    critical_lower: float = 0.30

    def __post_init__(self) -> None:
        if not 0.0 <= self.low_upper <= self.critical_lower <= 1.0:
            raise DataError(
                f"invalid risk bands: need 0 <= {self.low_upper} <= {self.critical_lower} <= 1"
            )


DEFAULT_BANDS = RiskBands()


def risk_flag(rare_ratio: float, bands: RiskBands = DEFAULT_BANDS) -> Risk:
    """Map a rare-term ratio to a risk band. Monotone nondecreasing in the ratio."""
    if not 0.0 <= rare_ratio <= 1.0:
        raise DataError(f"rare_ratio out of range [0, 1]: {rare_ratio}")
    if rare_ratio < bands.low_upper:
        return Risk.LOW
    if rare_ratio <= bands.critical_lower:
        return Risk.ELEVATED
    return Risk.CRITICAL


@dataclass(frozen=True)
class PassageLemmas:
    """Token lemmas of one passage, in order, duplicates preserved."""

    text_id: str
    passage_id: str
    lemmas: tuple[str, ...]

    @classmethod
    def from_raw(cls, text_id: str, passage_id: str, lemmas: Sequence[str]) -> "PassageLemmas":
        normalized = tuple(nfc(l) for l in lemmas)
        if not normalized or any(not l for l in normalized):
            raise DataError(f"passage {text_id}/{passage_id}: lemmas must be non-empty")
        return cls(text_id, str(passage_id), normalized)


@dataclass(frozen=True)
class PassageProfile:
    text_id: str
    passage_id: str
    term_count: int
    avg_zipf: float
    rare_count: int
    rare_ratio: float
    not_found_count: int
    nf_ratio: float
    risk: Risk


def profile(
    passage: PassageLemmas,
    index: FrequencyIndex,
    rare_threshold: int = RARE_THRESHOLD_DEFAULT,
    bands: RiskBands = DEFAULT_BANDS,
    unique_lemmas: bool = False,
) -> PassageProfile:
    """Profile a passage against a frequency index.

    Rarity is strict: a lemma counts as rare when its corpus frequency is
    < rare_threshold or it is absent. Absent lemmas contribute Zipf 0 to the
    mean and stay in the denominator. Counting is per token; unique_lemmas
    collapses duplicates first (sensitivity-analysis mode).
    """
    if not passage.lemmas:
        raise DataError(f"passage {passage.text_id}/{passage.passage_id} is empty")
    lemmas: Sequence[str] = passage.lemmas
    if unique_lemmas:
        lemmas = sorted(set(lemmas))
    n = len(lemmas)
    zipf_sum = 0.0
    rare = 0
    not_found = 0
    for lemma in lemmas:
        freq = index.frequency(lemma)
        if freq == 0:
            not_found += 1
            rare += 1
        else:
            zipf_sum += index.zipf(lemma)
            if freq < rare_threshold:
                rare += 1
    return PassageProfile(
        text_id=passage.text_id,
        passage_id=passage.passage_id,
        term_count=n,
        avg_zipf=zipf_sum / n,
        rare_count=rare,
        rare_ratio=rare / n,
        not_found_count=not_found,
        nf_ratio=not_found / n,
        risk=risk_flag(rare / n, bands),
    )


def read_passages_jsonl(path: str | Path) -> list[PassageLemmas]:
    """Read passages from JSON Lines:
    {"text_id": "...", "passage_id": "...", "lemmas": ["...", ...]}
    """
    path = Path(path)
    passages = []
    with path.open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                passages.append(
                    PassageLemmas.from_raw(obj["text_id"], obj["passage_id"], obj["lemmas"])
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: malformed passage record: {exc}") from exc
    if not passages:
        raise DataError(f"{path}: no passages")
    return passages


PROFILE_CSV_COLUMNS = ("Text", "Ch.", "Terms", "Avg. Zipf", "Rare Ratio", "Rare", "Not Found", "NF Ratio")


def profiles_to_csv(profiles: Iterable[PassageProfile], include_risk: bool = True) -> str:
    """Render profiles as CSV in the rarity-table column order, ratios as percentages."""
    cols = PROFILE_CSV_COLUMNS + (("Risk",) if include_risk else ())
    lines = [",".join(cols)]
    for p in profiles:
        row = [
            p.text_id,
            p.passage_id,
            str(p.term_count),
            f"{p.avg_zipf:.2f}",
            f"{round_half_up(100 * p.rare_ratio, 1):.1f}%",
            str(p.rare_count),
            str(p.not_found_count),
            f"{round_half_up(100 * p.nf_ratio, 1):.1f}%",
        ]
        if include_risk:
            row.append(p.risk.value)
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
