"""Report rendering as JSON, a standalone HTML page, or ANSI-colored text.

HTML and ANSI output highlight exactly the matched spans listed in the report.
A formula span always covers the whole ``$...$`` region, so formulas are
highlighted in full or not at all.
"""

from __future__ import annotations

import enum
import html
from typing import Optional

from .docmodel import Document
from .index import SimilarityReport


class RenderFormat(str, enum.Enum):
    JSON = "json"
    HTML = "html"
    ANSI = "ansi"


_ANSI = {"text": "\x1b[1;31m", "formula": "\x1b[1;41;97m", "figure": "\x1b[1;45;97m"}
_ANSI_EXCLUDED = "\x1b[2m"
_ANSI_RESET = "\x1b[0m"

_CSS = """
body { font-family: Georgia, serif; max-width: 52em; margin: 2em auto; line-height: 1.5; }
header { font-family: sans-serif; border-bottom: 1px solid #ccc; margin-bottom: 1em; }
pre.doc { white-space: pre-wrap; font-family: inherit; }
mark { background: #ffd0d0; color: #a00000; }
mark.formula { background: #ffb0b0; }
mark.figure { background: #f0c0ff; }
span.excluded { color: #999; }
table.channels td, table.channels th { padding: 0 1em 0 0; text-align: right; }
""".strip()


def _marks(report: SimilarityReport) -> list[tuple[int, int, str]]:
    """Matched A ranges, merged where runs of the same kind overlap."""
    out: list[tuple[int, int, str]] = []
    for span in sorted((s for s in report.spans if s.matched), key=lambda s: s.a_range):
        start, end = span.a_range
        if out and out[-1][2] == span.kind and start <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], end), span.kind)
        else:
            out.append((start, end, span.kind))
    return out


def _excluded(doc: Document) -> list[tuple[int, int]]:
    return [(s.start, s.end) for s in doc.segments if s.excluded]


def _pieces(doc: Document, report: SimilarityReport):
    """Yield ``(text, kind_or_None, excluded)`` covering the whole source in order."""
    raw = doc.source.encode("utf-8")
    cuts = {0, len(raw)}
    marks = _marks(report)
    zones = _excluded(doc)
    for a, b, _ in marks:
        cuts.update((a, b))
    for a, b in zones:
        cuts.update((a, b))
    points = sorted(cuts)
    for a, b in zip(points, points[1:]):
        kind = next((k for s, e, k in marks if s <= a and b <= e), None)
        excl = any(s <= a and b <= e for s, e in zones)
        yield raw[a:b].decode("utf-8"), kind, excl


def _html(report: SimilarityReport) -> str:
    a_id, b_id = report.direction
    rows = "".join(
        f"<tr><th>{name}</th><td>{ch.matched_units}</td><td>{ch.total_units}</td></tr>"
        for name, ch in report.channels.items())
    body = []
    if report.document is not None:
        for text, kind, excl in _pieces(report.document, report):
            piece = html.escape(text)
            if kind:
                piece = f'<mark class="{kind}">{piece}</mark>'
            if excl:
                piece = f'<span class="excluded">{piece}</span>'
            body.append(piece)
    flags = f"<p>flags: {html.escape(', '.join(report.flags))}</p>" if report.flags else ""
    return (
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
        f"<title>simdex {html.escape(a_id)} vs {html.escape(b_id)}</title>"
        f"<style>{_CSS}</style></head><body>\n"
        f"<header><h1>{report.index:.1f}%</h1>"
        f"<p>{html.escape(a_id)} against {html.escape(b_id)}, variant {report.variant}, "
        f"mode {report.mode.value}</p>{flags}"
        f"<table class=\"channels\"><tr><th></th><th>matched</th><th>total</th></tr>{rows}</table>"
        "</header>\n"
        f"<pre class=\"doc\">{''.join(body)}</pre>\n</body></html>\n")


def _ansi(report: SimilarityReport) -> str:
    a_id, b_id = report.direction
    lines = [f"{a_id} -> {b_id}: {report.index:.1f}% (variant {report.variant}, {report.mode.value})"]
    for name, ch in report.channels.items():
        lines.append(f"  {name:<8}{ch.matched_units:>7} / {ch.total_units}")
    if report.flags:
        lines.append("  flags: " + ", ".join(report.flags))
    out = "\n".join(lines) + "\n"
    if report.document is not None:
        parts = []
        for text, kind, excl in _pieces(report.document, report):
            style = (_ANSI[kind] if kind else "") + (_ANSI_EXCLUDED if excl else "")
            parts.append(f"{style}{text}{_ANSI_RESET}" if style else text)
        out += "\n" + "".join(parts)
        if not out.endswith("\n"):
            out += "\n"
    return out


def render_report(report: SimilarityReport, fmt: RenderFormat | str = RenderFormat.JSON) -> bytes:
    fmt = RenderFormat(fmt)
    if fmt is RenderFormat.JSON:
        return (report.to_json() + "\n").encode("utf-8")
    if fmt is RenderFormat.HTML:
        return _html(report).encode("utf-8")
    return _ansi(report).encode("utf-8")


def render_many(reports: list[SimilarityReport], fmt: RenderFormat | str,
                separator: Optional[str] = None) -> bytes:
    """Render one or two directional reports; JSON becomes an array when there are two."""
    fmt = RenderFormat(fmt)
    if len(reports) == 1:
        return render_report(reports[0], fmt)
    if fmt is RenderFormat.JSON:
        import json
        return (json.dumps([r.to_dict() for r in reports], ensure_ascii=False, indent=2)
                + "\n").encode("utf-8")
    if fmt is RenderFormat.HTML:
        pages = [_html(r) for r in reports]
        inner = [p.split("<body>\n", 1)[1].rsplit("</body>", 1)[0] for p in pages]
        return pages[0].split("<body>\n", 1)[0].encode("utf-8") + b"<body>\n" + \
            "<hr>\n".join(inner).encode("utf-8") + b"</body></html>\n"
    sep = separator if separator is not None else "\n" + "-" * 60 + "\n"
    return sep.join(_ansi(r) for r in reports).encode("utf-8")
