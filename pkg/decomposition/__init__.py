"""Decomposition module: categorized 2x2x2 comparisons behind the regression coefficient."""

from .models import CategorySummary, DecompositionReport, TermCategory, TermRecord, TreatedCounts
from .patterns import classify_pattern
from .terms import decompose, enumerate_terms, normalizer, save_terms_csv, summarize_report

__all__ = [
    "CategorySummary",
    "DecompositionReport",
    "TermCategory",
    "TermRecord",
    "TreatedCounts",
    "classify_pattern",
    "decompose",
    "enumerate_terms",
    "normalizer",
    "save_terms_csv",
    "summarize_report",
]
