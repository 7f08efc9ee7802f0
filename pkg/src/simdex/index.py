"""Directional similarity index of document A against document B.

Variant 1 compares formulas only. Variant 2 blends matched words, matched
formula leaves and matched figure area with weights. Variant 3 is variant 2
with stop terms masked out of the text channel. Every variant denominates
over A's retained content; index(A, B) and index(B, A) are separate numbers.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .config import WEIGHT_BAND
from .docmodel import FIGURE, FORMULA, Document, FigureDecl
from .formula_match import MatchMode, match_formulas
from .text_match import (RunParams, StopTermDictionary, apply_stop_terms, count_words,
                         find_matched_runs, matched_word_count)

CHANNELS = ("text", "formula", "figure")


@dataclass(frozen=True)
class Weights:
    w_formula: float = 7.0
    w_text: float = 1.0
    warn: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.w_formula <= 0 or self.w_text <= 0:
            raise ValueError("weights must be positive")
        lo, hi = WEIGHT_BAND
        if self.warn and not lo <= self.w_formula / self.w_text <= hi:
            warnings.warn(f"formula/text weight ratio {self.w_formula / self.w_text:g} is "
                          f"outside [{lo:g}, {hi:g}]", stacklevel=3)

    @classmethod
    def from_ratio(cls, ratio: float, warn: bool = True) -> "Weights":
        return cls(float(ratio), 1.0, warn)


@dataclass(frozen=True)
class Channel:
    """Matched and total content of one channel, raw and weighted."""

    matched_units: int = 0
    total_units: int = 0
    weight: float = 0.0

    @property
    def matched(self) -> Fraction:
        return Fraction(self.weight) * self.matched_units

    @property
    def total(self) -> Fraction:
        return Fraction(self.weight) * self.total_units


@dataclass(frozen=True)
class MatchSpan:
    kind: str
    a_range: tuple[int, int]
    b_range: Optional[tuple[int, int]]
    matched: bool


def _number(x: Fraction):
    """JSON number for an exact fraction: int when integral, else float."""
    return int(x) if x.denominator == 1 else float(x)


def round_half_up(value: Fraction, places: int = 1) -> float:
    scale = 10 ** places
    return math.floor(value * scale + Fraction(1, 2)) / scale


@dataclass(frozen=True)
class SimilarityReport:
    direction: tuple[str, str]
    variant: int
    mode: MatchMode
    channels: dict
    spans: tuple[MatchSpan, ...]
    params: dict
    flags: tuple[str, ...] = ()
    document: Optional[Document] = field(default=None, compare=False, repr=False)

    @property
    def matched_weight(self) -> Fraction:
        return sum((c.matched for c in self.channels.values()), Fraction(0))

    @property
    def total_weight(self) -> Fraction:
        return sum((c.total for c in self.channels.values()), Fraction(0))

    @property
    def exact_index(self) -> Fraction:
        total = self.total_weight
        return Fraction(100) * self.matched_weight / total if total else Fraction(0)

    @property
    def index(self) -> float:
        return round_half_up(self.exact_index)

    def to_dict(self) -> dict:
        return {
            "direction": {"a": self.direction[0], "b": self.direction[1]},
            "variant": self.variant,
            "mode": MatchMode(self.mode).value,
            "index": self.index,
            "channels": {
                name: {"matched": _number(ch.matched), "total": _number(ch.total),
                       "matched_units": ch.matched_units, "total_units": ch.total_units}
                for name, ch in self.channels.items()
            },
            "spans": [
                {"kind": s.kind, "a_range": list(s.a_range),
                 **({"b_range": list(s.b_range)} if s.b_range is not None else {}),
                 "matched": s.matched}
                for s in self.spans
            ],
            "params": self.params,
            "flags": list(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)


# --------------------------------------------------------------------------
# channels

def text_channel(a: Document, b: Document, params: RunParams,
                 stop_terms: Optional[StopTermDictionary] = None,
                 weight: float = 1.0) -> tuple[Channel, list[MatchSpan]]:
    words_a, refs_a = a.text_stream()
    words_b, refs_b = b.text_stream()
    if stop_terms is not None and len(stop_terms):
        words_a = apply_stop_terms(words_a, stop_terms)
        words_b = apply_stop_terms(words_b, stop_terms)
    runs = find_matched_runs(words_a, words_b, params)
    spans = [MatchSpan("text",
                       (refs_a[r.a_start].start, refs_a[r.a_end - 1].end),
                       (refs_b[r.b_start].start, refs_b[r.b_start + len(r) - 1].end),
                       True)
             for r in runs]
    channel = Channel(matched_word_count(runs, words_a), count_words(words_a), weight)
    return channel, spans


def formula_channel(a: Document, b: Document, mode: MatchMode,
                    weight: float = 1.0) -> tuple[Channel, list[MatchSpan]]:
    seg_a, seg_b = a.retained(FORMULA), b.retained(FORMULA)
    mm = match_formulas([s.payload for s in seg_a], [s.payload for s in seg_b], mode)
    spans, matched = [], 0
    for seg, j in zip(seg_a, mm.matches):
        if j is not None:
            matched += seg.payload.leaves
        spans.append(MatchSpan("formula", (seg.start, seg.end),
                               None if j is None else (seg_b[j].start, seg_b[j].end),
                               j is not None))
    return Channel(matched, a.formula_leaf_count, weight), spans


def figure_weight(fig: FigureDecl, word_count: int) -> int:
    return math.floor(Fraction(fig.area_fraction) * word_count + Fraction(1, 2))


def figure_contribution(figs_a: Sequence[FigureDecl], figs_b: Sequence[FigureDecl],
                        word_count: int) -> tuple[int, int]:
    """(matched, total) figure weight in word units.

    Each A figure weighs its area fraction times A's word count, rounded half
    up; it is matched when some B figure has the same digest.
    """
    digests = {f.digest for f in figs_b}
    matched = total = 0
    for fig in figs_a:
        w = figure_weight(fig, word_count)
        total += w
        if fig.digest in digests:
            matched += w
    return matched, total


def figure_channel(a: Document, b: Document,
                   weight: float = 1.0) -> tuple[Channel, list[MatchSpan]]:
    seg_a, seg_b = a.retained(FIGURE), b.retained(FIGURE)
    by_digest: dict = {}
    for s in seg_b:
        by_digest.setdefault(s.payload.digest, s)
    matched, total = figure_contribution([s.payload for s in seg_a], [s.payload for s in seg_b],
                                         a.word_count)
    spans = []
    for s in seg_a:
        hit = by_digest.get(s.payload.digest)
        spans.append(MatchSpan("figure", (s.start, s.end),
                               None if hit is None else (hit.start, hit.end), hit is not None))
    return Channel(matched, total, weight), spans


# --------------------------------------------------------------------------
# variants

def _direction(a: Document, b: Document) -> tuple[str, str]:
    return (a.doc_id or "A", b.doc_id or "B")


def _sorted_spans(spans: list[MatchSpan]) -> tuple[MatchSpan, ...]:
    return tuple(sorted(spans, key=lambda s: (s.a_range, s.kind)))


def variant1_index(a: Document, b: Document, mode: MatchMode = MatchMode.STRICT) -> SimilarityReport:
    formula, spans = formula_channel(a, b, mode, 1.0)
    flags = () if formula.total_units else ("no_formulas",)
    channels = {"text": Channel(weight=0.0), "formula": formula, "figure": Channel(weight=0.0)}
    return SimilarityReport(_direction(a, b), 1, MatchMode(mode), channels, _sorted_spans(spans),
                            {"denominator": "a"}, flags, a)


def _blended(a: Document, b: Document, variant: int, mode: MatchMode, weights: Weights,
             params: RunParams, stop_terms: Optional[StopTermDictionary]) -> SimilarityReport:
    text, t_spans = text_channel(a, b, params, stop_terms, weights.w_text)
    formula, f_spans = formula_channel(a, b, mode, weights.w_formula)
    figure, g_spans = figure_channel(a, b, weights.w_text)
    channels = {"text": text, "formula": formula, "figure": figure}
    flags = () if any(c.total_units for c in channels.values()) else ("empty_document",)
    report_params = {
        "denominator": "a",
        "min_run": params.min_run,
        "w_text": weights.w_text,
        "w_formula": weights.w_formula,
        "stop_terms": len(stop_terms) if stop_terms is not None else 0,
    }
    return SimilarityReport(_direction(a, b), variant, MatchMode(mode), channels,
                            _sorted_spans(t_spans + f_spans + g_spans), report_params, flags, a)


def variant2_index(a: Document, b: Document, mode: MatchMode = MatchMode.STRICT,
                   weights: Weights = Weights(), params: RunParams = RunParams()) -> SimilarityReport:
    return _blended(a, b, 2, mode, weights, params, None)


def variant3_index(a: Document, b: Document, mode: MatchMode = MatchMode.STRICT,
                   weights: Weights = Weights(), params: RunParams = RunParams(),
                   stop_terms: Optional[StopTermDictionary] = None) -> SimilarityReport:
    if stop_terms is None:
        from .config import default_stop_terms
        stop_terms = default_stop_terms()
    return _blended(a, b, 3, mode, weights, params, stop_terms)


def compare(a: Document, b: Document, variant: int = 3, config=None) -> SimilarityReport:
    """Run one variant with the settings of an :class:`~simdex.config.EngineConfig`."""
    from .config import EngineConfig
    cfg = config or EngineConfig()
    if variant == 1:
        return variant1_index(a, b, cfg.mode)
    weights = Weights.from_ratio(cfg.weight_ratio, warn=False)  # the config already warned
    params = RunParams(cfg.min_run)
    if variant == 2:
        return variant2_index(a, b, cfg.mode, weights, params)
    if variant == 3:
        return variant3_index(a, b, cfg.mode, weights, params, cfg.stop_terms)
    raise ValueError(f"unknown variant {variant}")
