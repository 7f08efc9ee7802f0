"""Similarity index for scientific documents with formulas.

Formulas are compared as whole units (optionally up to letter renaming),
metadata zones, stop terms and short word runs are ignored, and text,
formula and figure contributions are blended with explicit weights.
"""

from .docmodel import Document, FigureDecl, Segment, classify_zones, parse_document, tokenize_text
from .formula_match import (MatchMode, alpha_canonical, alpha_equal, baseline_fragment_index,
                            match_formulas, strict_equal)
from .mathparse import FormulaError, NormalizationTable, leaf_count, lex_formula, normalize, parse_formula
from .text_match import RunParams, StopTermDictionary, apply_stop_terms, find_matched_runs, matched_word_count

__version__ = "0.1.0"
