"""Matched word runs between two token streams.

A token stream is a list of lowercase words where ``None`` marks a break:
a masked stop term, a formula or figure between text runs, or an excluded
zone. Runs never cross a break and breaks never count as words.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .docmodel import tokenize_words

Stream = Sequence[Optional[str]]


@dataclass(frozen=True)
class StopTermDictionary:
    entries: tuple[tuple[str, ...], ...] = ()

    MAX_WORDS = 8

    def __post_init__(self):
        for entry in self.entries:
            if not 1 <= len(entry) <= self.MAX_WORDS:
                raise ValueError(f"stop term must have 1..{self.MAX_WORDS} words: {entry!r}")

    @classmethod
    def from_terms(cls, terms: Iterable[str]) -> "StopTermDictionary":
        seen: dict[tuple[str, ...], None] = {}
        for term in terms:
            words = tuple(tokenize_words(term))
            if words:
                seen.setdefault(words, None)
        return cls(tuple(seen))

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "StopTermDictionary":
        return cls.from_terms(line.split("#", 1)[0] for line in lines)

    def __len__(self) -> int:
        return len(self.entries)

    def __add__(self, other: "StopTermDictionary") -> "StopTermDictionary":
        return StopTermDictionary.from_terms(" ".join(e) for e in self.entries + other.entries)


@dataclass(frozen=True)
class RunParams:
    min_run: int = 8

    def __post_init__(self):
        if self.min_run < 1:
            raise ValueError("min_run must be at least 1")


@dataclass(frozen=True)
class Run:
    """Tokens ``a_start:a_end`` of A equal tokens ``b_start:b_start+len`` of B."""

    a_start: int
    a_end: int
    b_start: int

    def __len__(self) -> int:
        return self.a_end - self.a_start


def apply_stop_terms(words: Stream, terms: StopTermDictionary) -> list[Optional[str]]:
    """Mask every occurrence of every dictionary entry.

    Where occurrences overlap, the union of their positions is masked, so the
    masked set can only grow as the dictionary grows. On non-overlapping text
    this is the same as longest-match-first scanning.
    """
    out = list(words)
    if not terms.entries:
        return out
    table = set(terms.entries)
    sizes = sorted({len(e) for e in terms.entries}, reverse=True)
    hit = [False] * len(out)
    for i in range(len(out)):
        if out[i] is None:
            continue
        for size in sizes:
            window = out[i:i + size]
            if len(window) == size and tuple(window) in table:
                hit[i:i + size] = [True] * size
                break  # shorter entries at i lie inside this one
    return [None if h else w for w, h in zip(out, hit)]


def count_words(words: Stream) -> int:
    return sum(w is not None for w in words)


def _encode(a: Stream, b: Stream) -> tuple[np.ndarray, np.ndarray]:
    vocab: dict[str, int] = {}
    enc = [np.fromiter((-1 if w is None else vocab.setdefault(w, len(vocab)) for w in s),
                       dtype=np.int64, count=len(s)) for s in (a, b)]
    return enc[0], enc[1]


def find_matched_runs(words_a: Stream, words_b: Stream, params: RunParams = RunParams()) -> list[Run]:
    """Maximal runs of at least ``min_run`` A tokens that occur contiguously in B.

    A run is reported when no longer common run of A contains it; runs may
    overlap. Each run records the lowest B position where it occurs.
    """
    width = params.min_run
    a, b = _encode(words_a, words_b)
    if a.size < width or b.size < width:
        return []
    ha, va = kernels.window_hashes(a, width)
    hb, vb = kernels.window_hashes(b, width)
    b_starts = np.flatnonzero(vb)
    if not b_starts.size:
        return []
    order = b_starts[np.argsort(hb[b_starts], kind="stable")]
    sorted_h = hb[order]
    a_starts = np.flatnonzero(va)
    lo = np.searchsorted(sorted_h, ha[a_starts], side="left")
    hi = np.searchsorted(sorted_h, ha[a_starts], side="right")
    hit = hi > lo
    a_starts, lo, hi = a_starts[hit], lo[hit], hi[hit]
    best_len, best_pos = kernels.best_extensions(a, b, a_starts, lo, hi, order, width)

    runs: list[Run] = []
    reach = 0
    for start, length, pos in zip(a_starts.tolist(), best_len.tolist(), best_pos.tolist()):
        if length >= width and start + length > reach:
            runs.append(Run(start, start + length, pos))
            reach = start + length
    return runs


def coverage(runs: Iterable[Run], n: int) -> np.ndarray:
    diff = np.zeros(n + 1, dtype=np.int64)
    for r in runs:
        diff[r.a_start] += 1
        diff[r.a_end] -= 1
    return np.cumsum(diff[:-1]) > 0


def matched_word_count(runs: Iterable[Run], words_a: Stream) -> int:
    """Distinct A positions covered by at least one run."""
    return int(coverage(runs, len(words_a)).sum())
