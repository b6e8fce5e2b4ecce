"""Classification of the eight treatment indicators behind a comparison.

Pattern order: primary (D_srt, D_s'rt, D_srt', D_s'rt') then placebo
(D_sr't, D_s'r't, D_sr't', D_s'r't'). A primary with the anchor untreated
at t' and the comparison unit untreated at both periods is valid (t' < t);
one where both are treated at t' is invalid (t' > t, the comparison unit
already treated).
"""

from collections.abc import Sequence

import numpy as np

from .models import TermCategory

# Placebo bits (D_sr't, D_s'r't, D_sr't', D_s'r't') that put treated cells in the placebo
_INVALID_PLACEBO = {
    (0, 1, 0, 1): "S2_TREATED_BOTH",
    (1, 1, 1, 1): "ALL_TREATED",
    (1, 1, 0, 0): "TWO_TREATED_AT_T",
    (1, 0, 1, 0): "S_TREATED_BOTH",
    (0, 0, 1, 1): "TWO_TREATED_AT_T2",
}

# (t-value, t'-value) pair a single unit cannot show under staggered adoption
_FORBIDDEN_PAIR = {True: (0, 1), False: (1, 0)}

_FLIPPED = {
    True: {(0, 1, 0, 0), (1, 1, 1, 0)},
    False: {(0, 1, 1, 1), (0, 0, 1, 0)},
}

# Placebo patterns whose terms cancel against a mirrored tuple
_CANCELLING = {
    True: {(1, 0, 0, 0), (1, 1, 0, 1)},
    False: {(0, 0, 0, 1), (1, 0, 1, 1)},
}


def classify_pattern(pattern: Sequence[int]) -> TermCategory:
    """Map an 8-indicator pattern to its comparison category.

    Args:
        pattern: Eight 0/1 values in primary-then-placebo order.

    Returns:
        The category; every one of the 256 patterns maps to exactly one.
    """
    if len(pattern) != 8:
        raise ValueError(f"pattern needs 8 indicators, got {len(pattern)}")
    p0, p1, p2, p3, q0, q1, q2, q3 = (int(bool(b)) for b in pattern)

    if not p0 or p1:
        return TermCategory.VANISHING
    if (p2, p3) == (1, 0):
        return TermCategory.VANISHING
    if (p2, p3) == (0, 1):
        return TermCategory.RULED_OUT

    valid = (p2, p3) == (0, 0)
    forbidden = _FORBIDDEN_PAIR[valid]
    if (q0, q2) == forbidden or (q1, q3) == forbidden:
        return TermCategory.RULED_OUT

    placebo = (q0, q1, q2, q3)
    if placebo == (0, 0, 0, 0):
        return TermCategory.VALID_VALID if valid else TermCategory.INVALID_VALID
    if placebo in _FLIPPED[valid]:
        return TermCategory.FLIPPED_VALID if valid else TermCategory.FLIPPED_INVALID
    if placebo in _CANCELLING[valid]:
        return TermCategory.VANISHING

    prefix = "VALID_INVALID_" if valid else "INVALID_INVALID_"
    return TermCategory[prefix + _INVALID_PLACEBO[placebo]]


def pattern_code(pattern: Sequence[int]) -> int:
    """Pack a pattern into an integer, first indicator as the high bit."""
    code = 0
    for bit in pattern:
        code = (code << 1) | int(bool(bit))
    return code


def code_pattern(code: int) -> tuple[int, ...]:
    return tuple((code >> (7 - i)) & 1 for i in range(8))


CATEGORIES = list(TermCategory)
CATEGORY_TABLE = tuple(classify_pattern(code_pattern(code)) for code in range(256))
CATEGORY_INDEX = np.array([CATEGORIES.index(c) for c in CATEGORY_TABLE], dtype=np.int64)
CONTRIBUTING = np.array([c.contributes for c in CATEGORIES])
FLIPPED = np.array([c.flipped for c in CATEGORIES])
