"""Whole-formula equality (strict and up to letter renaming) and matching.

A formula is either matched in full or not at all. The only fractional
scores in this module come from the ``baseline_*`` functions (LEGACY), which mimic
fragment counting for demonstration and are never used by the index.
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Optional, Sequence

from .mathparse import Ident, LEAVES, Node, leaf_count, leaves


class MatchMode(str, enum.Enum):
    STRICT = "strict"
    ALPHA = "alpha"


def strict_equal(a: Node, b: Node) -> bool:
    return a == b


def alpha_canonical(ast: Node) -> Node:
    """Rename every letter to ``v1, v2, ...`` by order of first occurrence.

    Letters inside subscripts and superscripts take part in the renaming;
    numbers, operators, function names and bracket kinds are untouched.
    """
    names: dict[str, str] = {}

    def visit(node):
        if node is None:
            return None
        if isinstance(node, Ident):
            if node.name not in names:
                names[node.name] = f"v{len(names) + 1}"
            return Ident(names[node.name])
        if isinstance(node, LEAVES):
            return node
        # field order of every node class is its pre-order traversal order
        values = {}
        for fname in node.__dataclass_fields__:
            v = getattr(node, fname)
            if isinstance(v, tuple):
                v = tuple(visit(c) for c in v)
            elif hasattr(v, "__dataclass_fields__"):
                v = visit(v)
            values[fname] = v
        return type(node)(**values)

    return visit(ast)


def alpha_equal(a: Node, b: Node) -> bool:
    return alpha_canonical(a) == alpha_canonical(b)


def comparison_key(ast: Node, mode: MatchMode) -> Hashable:
    return alpha_canonical(ast) if MatchMode(mode) is MatchMode.ALPHA else ast


@dataclass(frozen=True)
class FormulaMatchMap:
    """For each formula of A, the index of the first equal formula of B (or None)."""

    matches: tuple[Optional[int], ...]

    @property
    def matched(self) -> tuple[bool, ...]:
        return tuple(m is not None for m in self.matches)

    def __len__(self) -> int:
        return len(self.matches)

    @property
    def matched_count(self) -> int:
        return sum(m is not None for m in self.matches)


def _key(formula, mode: MatchMode) -> Hashable:
    if hasattr(formula, "comparison_key"):
        return formula.comparison_key(mode)
    return comparison_key(formula, mode)


def match_formulas(a: Sequence, b: Sequence, mode: MatchMode = MatchMode.STRICT) -> FormulaMatchMap:
    """Match each formula of ``a`` against ``b``; the lowest equal index of ``b`` wins.

    Items are trees or document formulas (anything with ``comparison_key``).
    A formula of ``b`` may serve several formulas of ``a``.
    """
    first: dict = {}
    for j, formula in enumerate(b):
        first.setdefault(_key(formula, mode), j)
    return FormulaMatchMap(tuple(first.get(_key(f, mode)) for f in a))


def baseline_fragment_index(candidate: Node, reference: Node) -> float:
    """LEGACY: share of the reference's leaf multiset found in the candidate, in percent.

    This reproduces fragment-level formula counting and is deliberately
    wrong as a similarity measure.
    """
    ref = Counter(leaves(reference))
    common = ref & Counter(leaves(candidate))
    return 100.0 * sum(common.values()) / leaf_count(reference)


_WORD = re.compile(r"[^\W\d_]+")


def baseline_letter_fragment_index(candidate: str, reference: str, min_fragment: int = 2) -> float:
    """LEGACY: percent of candidate letters covered by letter fragments shared with the reference.

    A letter counts when it lies inside a within-word substring of length at
    least ``min_fragment`` that also occurs inside some reference word.
    """
    ref_words = [w.lower() for w in _WORD.findall(reference)]
    ref_grams = {w[i:i + min_fragment] for w in ref_words for i in range(len(w) - min_fragment + 1)}
    total = covered = 0
    for word in _WORD.findall(candidate):
        word = word.lower()
        hit = [False] * len(word)
        for i in range(len(word) - min_fragment + 1):
            if word[i:i + min_fragment] in ref_grams:
                hit[i:i + min_fragment] = [True] * min_fragment
        total += len(word)
        covered += sum(hit)
    return 100.0 * covered / total if total else 0.0
