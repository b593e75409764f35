"""Small shared helpers: Unicode normalization and table-style rounding."""

import unicodedata
from decimal import ROUND_HALF_UP, Decimal


def nfc(text: str) -> str:
    """Normalize to NFC. Polytonic Greek has several byte encodings per glyph;
    all comparisons in this package happen after NFC."""
    return unicodedata.normalize("NFC", text)


def round_half_up(value: float, ndigits: int = 1) -> float:
    """Round with ties away from zero (the convention used in rendered tables).

    Python's built-in round() is banker's rounding, which would turn e.g.
    36.65 into 36.6 instead of 36.7.
    """
    q = Decimal(1).scaleb(-ndigits)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))
