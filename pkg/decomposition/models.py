"""Data models for the 2x2x2 comparison decomposition."""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field


class TermCategory(str, Enum):
    """Validity class of a primary/placebo comparison pair."""
    VALID_VALID = "ValidPrimary_ValidPlacebo"
    VALID_INVALID_S_TREATED_BOTH = "ValidPrimary_InvalidPlacebo(s_treated_both)"
    VALID_INVALID_S2_TREATED_BOTH = "ValidPrimary_InvalidPlacebo(s2_treated_both)"
    VALID_INVALID_TWO_TREATED_AT_T = "ValidPrimary_InvalidPlacebo(two_treated_at_t)"
    VALID_INVALID_TWO_TREATED_AT_T2 = "ValidPrimary_InvalidPlacebo(two_treated_at_t2)"
    VALID_INVALID_ALL_TREATED = "ValidPrimary_InvalidPlacebo(all_treated)"
    INVALID_VALID = "InvalidPrimary_ValidPlacebo"
    INVALID_INVALID_S_TREATED_BOTH = "InvalidPrimary_InvalidPlacebo(s_treated_both)"
    INVALID_INVALID_S2_TREATED_BOTH = "InvalidPrimary_InvalidPlacebo(s2_treated_both)"
    INVALID_INVALID_TWO_TREATED_AT_T = "InvalidPrimary_InvalidPlacebo(two_treated_at_t)"
    INVALID_INVALID_TWO_TREATED_AT_T2 = "InvalidPrimary_InvalidPlacebo(two_treated_at_t2)"
    INVALID_INVALID_ALL_TREATED = "InvalidPrimary_InvalidPlacebo(all_treated)"
    FLIPPED_VALID = "FlippedDiD_ValidPrimary"
    FLIPPED_INVALID = "FlippedDiD_InvalidPrimary"
    VANISHING = "Vanishing"
    RULED_OUT = "RuledOutByStaggering"

    @property
    def contributes(self) -> bool:
        """Whether terms of this class enter the reconstruction sum."""
        return self not in (TermCategory.VANISHING, TermCategory.RULED_OUT)

    @property
    def contaminated(self) -> bool:
        """Invalid primary, invalid placebo or flipped comparisons."""
        return self.contributes and self != TermCategory.VALID_VALID

    @property
    def flipped(self) -> bool:
        return self in (TermCategory.FLIPPED_VALID, TermCategory.FLIPPED_INVALID)


class TermRecord(BaseModel):
    """One ordered (s, s2, t, t2, r, r2) comparison anchored on a treated cell.

    ``double_counted`` is the alternative accounting in which a flipped term
    counts as twice its primary 2x2; for every other category it equals
    ``value``.
    """
    s: int
    s2: int
    t: int
    t2: int
    r: int
    r2: int
    pattern: tuple[int, int, int, int, int, int, int, int]
    category: TermCategory
    primary_did: float
    placebo_did: float
    value: float
    double_counted: float


class CategorySummary(BaseModel):
    """Aggregate over all terms of one category."""
    terms: int = 0
    sum: float = 0.0
    weight_mass: float = 0.0


class TreatedCounts(BaseModel):
    """Treated-cell count N and its marginal counts."""
    total: int
    sr: list[list[int]]
    st: list[list[int]]
    rt: list[list[int]]
    s: list[int]
    r: list[int]
    t: list[int]


class DecompositionReport(BaseModel):
    """Full accounting of the regression coefficient by comparison category."""
    omega: float
    counts: TreatedCounts
    categories: dict[TermCategory, CategorySummary]
    total_weight_mass: float
    tau_reconstructed: float
    tau_regression: float
    skipped_diagonal: int = Field(description="tuples with s2 == s or t2 == t, identically zero")
    flipped_value_sum: float
    flipped_double_counted_sum: float
    vanishing_sum: float = Field(description="sum over cancelling terms, zero up to rounding")
    omega_check: Optional[float] = Field(default=None, description="SRT times the residual treatment sum of squares")

    def contaminated_mass(self) -> float:
        return sum(c.weight_mass for k, c in self.categories.items() if k.contaminated)
