"""Source documents: segmentation, word tokens and zone exclusion.

Input is UTF-8 text where ``$...$`` / ``$$...$$`` delimit formulas, lines
starting with ``#`` are headings and ``![fig:ID digest=HEX area=F]`` declares
a figure. All offsets are byte offsets into the UTF-8 encoding.
"""

from __future__ import annotations

import re
from importlib.resources import files
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Optional, Union

import numpy as np

from . import mathparse
from .mathparse import FormulaError, Node, NormalizationTable

TEXT = "text"
FORMULA = "formula"
FIGURE = "figure"
HEADING = "heading"

_WORD_RE = re.compile(r"[^\W_]+")
_HEADING_RE = re.compile(r"(#{1,6})[ \t]+(.*?)[ \t#]*$")
_LIST_ITEM_RE = re.compile(r"[ \t]*(?:[-+]|\d+[.)]|\[\d+\])[ \t]")
_FIGURE_RE = re.compile(r"!\[fig:([^\s\]]+)((?:[ \t]+[A-Za-z_]+=[^\s\]]+)*)[ \t]*\]")
_TAG_LABEL = r"(?:\\[A-Za-z]+\s*\{\s*[\w.*']{1,8}\s*\}|[\w.*']{1,8})"
_TAG_SPACE = r"(?:\\[,;:!]|\\q?quad|\s)"
_TAG_RE = re.compile(r"(?:\\tag\*?\{(?:[^{}]|\{[^{}]*\})*\}"
                     r"|" + _TAG_SPACE + r"*\\q?quad" + _TAG_SPACE + r"*\(\s*" + _TAG_LABEL
                     + r"\s*\))\s*$")
_STYLE_RE = re.compile(r"\*+")



class DocumentParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class WordToken(NamedTuple):
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class FigureDecl:
    id: str
    digest: str
    area_fraction: float

    def __post_init__(self):
        if not self.digest:
            raise ValueError("figure digest must be non-empty")
        if not 0.0 <= self.area_fraction <= 1.0:
            raise ValueError(f"area_fraction out of [0, 1]: {self.area_fraction}")


@dataclass(frozen=True)
class FormulaPayload:
    """A formula as written plus either its normalized tree or the parse error."""

    source: str
    ast: Optional[Node] = None
    error: Optional[str] = None
    display: bool = False
    leaves: int = 0

    def comparison_key(self, mode):
        from .formula_match import comparison_key
        if self.ast is None:
            return ("opaque", self.source)
        return comparison_key(self.ast, mode)


Payload = Union[tuple, FormulaPayload, FigureDecl, str]


@dataclass(frozen=True)
class Segment:
    kind: str
    start: int
    end: int
    payload: Payload
    excluded: bool = False
    level: int = 0  # heading depth; 0 for non-headings

    @property
    def words(self) -> tuple[WordToken, ...]:
        return self.payload if self.kind == TEXT else ()


@dataclass(frozen=True)
class Document:
    source: str
    segments: tuple[Segment, ...]
    source_len: int
    word_count: int = 0
    formula_leaf_count: int = 0
    doc_id: str = ""

    @classmethod
    def build(cls, source: str, segments: Iterable[Segment], doc_id: str = "",
              source_len: Optional[int] = None) -> "Document":
        segments = tuple(segments)
        if source_len is None:
            source_len = len(source.encode("utf-8"))
        words = sum(len(s.payload) for s in segments if s.kind == TEXT and not s.excluded)
        leaves = sum(s.payload.leaves for s in segments if s.kind == FORMULA and not s.excluded)
        return cls(source, segments, source_len, words, leaves, doc_id)

    def retained(self, kind: str) -> list[Segment]:
        return [s for s in self.segments if s.kind == kind and not s.excluded]

    @property
    def formulas(self) -> list[FormulaPayload]:
        return [s.payload for s in self.retained(FORMULA)]

    @property
    def figures(self) -> list[FigureDecl]:
        return [s.payload for s in self.retained(FIGURE)]

    def text_stream(self) -> tuple[list[Optional[str]], list[Optional[WordToken]]]:
        """Retained words in order, with ``None`` wherever a non-text or
        excluded segment interrupts the prose."""
        words: list[Optional[str]] = []
        refs: list[Optional[WordToken]] = []
        for seg in self.segments:
            if seg.kind == TEXT and not seg.excluded:
                for tok in seg.payload:
                    words.append(tok.text)
                    refs.append(tok)
            else:
                if words and words[-1] is not None:
                    words.append(None)
                    refs.append(None)
        return words, refs

    def byte_text(self, start: int, end: int) -> str:
        return self.source.encode("utf-8")[start:end].decode("utf-8")


class _ByteMap:
    """Char index -> byte offset for one source string."""

    def __init__(self, source: str):
        raw = source.encode("utf-8")
        if len(raw) == len(source):
            self.table = None
        else:
            arr = np.frombuffer(raw, dtype=np.uint8)
            starts = np.flatnonzero((arr & 0xC0) != 0x80)
            self.table = np.append(starts, len(raw))

    def __call__(self, i: int) -> int:
        return i if self.table is None else int(self.table[i])


def tokenize_words(text: str) -> list[str]:
    return [m.group().lower() for m in _WORD_RE.finditer(text)]


def tokenize_text(text: str, base: int = 0, bytemap: Optional[_ByteMap] = None) -> list[WordToken]:
    """Lowercased letter/digit runs of ``text``; punctuation (hyphens included) separates words.

    ``base`` is the char offset of ``text`` inside the document whose
    ``bytemap`` converts offsets to bytes.
    """
    conv = bytemap or (lambda i: i)
    return [WordToken(m.group().lower(), conv(base + m.start()), conv(base + m.end()))
            for m in _WORD_RE.finditer(text)]


def _clean_display(content: str) -> str:
    prev = None
    while prev != content:
        prev = content
        content = _TAG_RE.sub("", content)
    return content


def make_formula(content: str, display: bool = False,
                 table: Optional[NormalizationTable] = None) -> FormulaPayload:
    src = _clean_display(content) if display else content
    try:
        tree = mathparse.trim_punctuation(mathparse.parse(src))
        tree = mathparse.normalize(tree, table)
    except FormulaError as exc:
        try:
            weight = len(mathparse.lex_formula(src))
        except FormulaError:
            weight = sum(not c.isspace() for c in src)
        return FormulaPayload(content, None, str(exc), display, max(weight, 1))
    return FormulaPayload(content, tree, None, display, mathparse.leaf_count(tree))


def _parse_figure(line: str, offset: int) -> tuple[FigureDecl, int]:
    m = _FIGURE_RE.match(line)
    directive = line.split("]", 1)[0] + "]" if "]" in line else line
    if not m:
        raise DocumentParseError(f"malformed figure directive {directive!r}", offset)
    attrs = dict(kv.split("=", 1) for kv in m.group(2).split())
    digest = attrs.get("digest", "")
    if not re.fullmatch(r"[0-9A-Fa-f]+", digest):
        raise DocumentParseError(f"figure directive {directive!r} needs digest=HEX", offset)
    try:
        area = float(attrs.get("area", "0"))
        fig = FigureDecl(m.group(1), digest.lower(), area)
    except ValueError as exc:
        raise DocumentParseError(f"figure directive {directive!r}: {exc}", offset) from None
    return fig, m.end()


def _find_closing(src: str, i: int, delim: str) -> int:
    while True:
        j = src.find(delim, i)
        if j < 0:
            return -1
        if j > 0 and src[j - 1] == "\\":
            i = j + 1
            continue
        return j


def parse_document(source: str, config=None, doc_id: str = "") -> Document:
    """Split ``source`` into text runs, formulas, figures and headings.

    Styling markers (``*``/``**`` in prose, ``\\mathbf``-like commands in
    formulas) never reach tokens or formula trees.
    """
    table = getattr(config, "normalization", None) or NormalizationTable.default()
    bmap = _ByteMap(source)
    segments: list[Segment] = []
    n = len(source)

    def flush(start: int, end: int) -> None:
        chunk = source[start:end]
        stripped = chunk.strip()
        if not stripped or not _STYLE_RE.sub("", stripped).strip():
            return
        lead = len(chunk) - len(chunk.lstrip())
        s, e = start + lead, start + lead + len(stripped)
        segments.append(Segment(TEXT, bmap(s), bmap(e), tuple(tokenize_text(stripped, s, bmap))))

    i = pending = 0
    line_start = True
    while i < n:
        if line_start:
            line_start = False
            eol = source.find("\n", i)
            eol = n if eol < 0 else eol
            line = source[i:eol]
            body = line.lstrip()
            indent = len(line) - len(body)
            heading = _HEADING_RE.match(line)
            if heading:
                flush(pending, i)
                title = _STYLE_RE.sub("", heading.group(2)).strip()
                segments.append(Segment(HEADING, bmap(i), bmap(i + len(line.rstrip())), title,
                                        level=len(heading.group(1))))
                i = pending = eol
                continue
            if body.startswith("![fig:"):
                flush(pending, i)
                fig, used = _parse_figure(body, bmap(i + indent))
                segments.append(Segment(FIGURE, bmap(i + indent), bmap(i + indent + used), fig))
                i = pending = i + indent + used
                continue
            if not body or _LIST_ITEM_RE.match(line):
                flush(pending, i)
                pending = i
        ch = source[i]
        if ch == "\\" and i + 1 < n and source[i + 1] == "$":
            i += 2
            continue
        if ch == "$":
            flush(pending, i)
            display = source.startswith("$$", i)
            delim = "$$" if display else "$"
            j = _find_closing(source, i + len(delim), delim)
            if j < 0 or (not display and "\n\n" in source[i:j]):
                raise DocumentParseError(f"unterminated {delim} math delimiter", bmap(i))
            content = source[i + len(delim):j]
            end = j + len(delim)
            segments.append(Segment(FORMULA, bmap(i), bmap(end),
                                    make_formula(content, display, table)))
            i = pending = end
            continue
        if ch == "\n":
            line_start = True
        i += 1
    flush(pending, n)
    return Document.build(source, segments, doc_id, bmap(n))


def classify_zones(doc: Document, rules: Optional[Iterable[str]] = None) -> Document:
    """Exclude every segment under a heading whose title matches a rule.

    The zone lasts until the next heading of the same or a shallower level.
    """
    if rules is None:
        rules = DEFAULT_ZONE_PATTERNS
    patterns = [re.compile(r, re.IGNORECASE) for r in rules]
    out: list[Segment] = []
    zone_level = 0
    for seg in doc.segments:
        if seg.kind == HEADING:
            if zone_level and seg.level <= zone_level:
                zone_level = 0
            if not zone_level and any(p.search(seg.payload) for p in patterns):
                zone_level = seg.level
        out.append(replace(seg, excluded=bool(zone_level)))
    return Document.build(doc.source, out, doc.doc_id, doc.source_len)


def load_patterns(lines: Iterable[str]) -> tuple[str, ...]:
    """One pattern per line; ``#`` starts a comment."""
    out = []
    for line in lines:
        line = line.strip()
        if line and not line.startswith("#"):
            re.compile(line)
            out.append(line)
    return tuple(out)


DEFAULT_ZONE_PATTERNS = load_patterns(
    files("simdex").joinpath("data/exclude_zones.txt").read_text("utf-8").splitlines())


def load_document(source: str, config=None, doc_id: str = "") -> Document:
    """Parse ``source`` and apply the zone rules of ``config`` (defaults when absent)."""
    doc = parse_document(source, config, doc_id)
    return classify_zones(doc, getattr(config, "zone_patterns", None))
