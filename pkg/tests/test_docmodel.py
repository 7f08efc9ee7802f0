import random
import re

import pytest

from simdex.docmodel import (FIGURE, FORMULA, HEADING, TEXT, DocumentParseError, FigureDecl,
                             classify_zones, load_document, load_patterns, parse_document,
                             tokenize_text)
from simdex.fixtures import fixture_document, fixture_text


def test_empty_source():
    doc = parse_document("")
    assert doc.segments == () and doc.word_count == 0 and doc.source_len == 0


def test_inline_formula_splits_text():
    doc = parse_document("Let $y=a+b$.")
    assert [s.kind for s in doc.segments] == [TEXT, FORMULA, TEXT]
    assert [t.text for t in doc.segments[0].words] == ["let"]
    assert doc.segments[2].words == ()
    assert doc.formula_leaf_count == 5


def test_tokenizer_rules():
    assert [t.text for t in tokenize_text("Важно отметить, что")] == ["важно", "отметить", "что"]
    assert [t.text for t in tokenize_text("non-linear PDE")] == ["non", "linear", "pde"]
    assert [t.text for t in tokenize_text("in 2019 we")] == ["in", "2019", "we"]


def test_word_offsets_are_bytes():
    source = "Уравнение $x$ heat"
    doc = parse_document(source)
    raw = source.encode("utf-8")
    for seg in doc.segments:
        for tok in seg.words:
            assert raw[tok.start:tok.end].decode("utf-8").lower() == tok.text
    formula = doc.segments[1]
    assert raw[formula.start:formula.end] == b"$x$"


def test_tt1_variant2_segments():
    doc = fixture_document("tt1_v2.md")
    formulas = doc.retained(FORMULA)
    display = [s for s in formulas if s.payload.display]
    inline = [s.payload.source for s in formulas if not s.payload.display]
    assert len(display) == 3
    assert inline == ["f = f(x)", "g = g(t)"]
    assert "aligned" in display[2].payload.source
    assert all(s.payload.error is None for s in formulas)


def test_tt1_word_counts_match_naive_count():
    from oracles import naive_words
    for name in ("tt1_v1.md", "tt1_v2.md"):
        expected = sum(w is not None for w in naive_words(fixture_text(name)))
        assert fixture_document(name).word_count == expected


def test_segments_ordered_and_within_bounds():
    for name in ("tt1_v1.md", "tt2_left.md", "literature.md", "catdog_a.md", "metadata_a.md"):
        doc = fixture_document(name)
        last = 0
        for seg in doc.segments:
            assert last <= seg.start < seg.end <= doc.source_len
            last = seg.end


def test_headings_and_figures():
    src = "# Intro\n\nText here.\n\n![fig:f1 digest=ABCD area=0.25]\n\nMore."
    doc = parse_document(src)
    kinds = [s.kind for s in doc.segments]
    assert kinds == [HEADING, TEXT, FIGURE, TEXT]
    assert doc.segments[0].payload == "Intro"
    assert doc.segments[2].payload == FigureDecl("f1", "abcd", 0.25)


@pytest.mark.parametrize("src,offset", [("abc $x+1", 4), ("ok $$x", 3), ("α $x", 3)])
def test_unterminated_math(src, offset):
    with pytest.raises(DocumentParseError) as info:
        parse_document(src)
    assert info.value.offset == offset


@pytest.mark.parametrize("line", ["![fig:x area=0.5]", "![fig:x digest=zz area=0.5]",
                                  "![fig:x digest=ab area=2]", "![fig: digest=ab]"])
def test_malformed_figure(line):
    with pytest.raises(DocumentParseError) as info:
        parse_document("text\n\n" + line)
    assert "fig:" in str(info.value)


def test_escaped_dollar_is_text():
    doc = parse_document("costs \\$5 today")
    assert [s.kind for s in doc.segments] == [TEXT]


def test_unparseable_formula_kept_opaque():
    doc = parse_document("see $a^^b$ here")
    payload = doc.formulas[0]
    assert payload.ast is None and payload.error
    assert payload.leaves >= 1
    assert doc.formula_leaf_count == payload.leaves


class TestZones:
    def test_references_excluded(self):
        src = "Body text.\n\n# References\n\n1. One.\n2. Two.\n3. Three.\n"
        doc = classify_zones(parse_document(src))
        cites = [s for s in doc.segments if s.kind == TEXT and s.excluded]
        assert len(cites) == 3
        assert doc.word_count == 2

    def test_no_headings_no_exclusion(self):
        doc = classify_zones(parse_document("plain text $x$ only"))
        assert not any(s.excluded for s in doc.segments)

    def test_literature_fixture(self):
        doc = fixture_document("literature.md")
        entries = [s for s in doc.segments if s.excluded and s.kind == TEXT]
        assert len(entries) == 19

    def test_zone_ends_at_same_level_heading(self):
        src = "# Acknowledgments\n\nThanks.\n\n## Sub\n\nStill.\n\n# Results\n\nKept."
        doc = classify_zones(parse_document(src))
        text = [(s.excluded, [t.text for t in s.words]) for s in doc.segments if s.kind == TEXT]
        assert text == [(True, ["thanks"]), (True, ["still"]), (False, ["kept"])]

    def test_custom_patterns(self):
        patterns = load_patterns(["# comment", "appendix", ""])
        doc = classify_zones(parse_document("# Appendix\n\nx y z"), patterns)
        assert doc.word_count == 0

    def test_excluded_formulas_leave_leaf_count(self):
        doc = classify_zones(parse_document("$a+b$\n\n# Funding\n\n$x$ grant"))
        assert doc.formula_leaf_count == 3


STYLE_WRAPPERS = [("**", "**"), ("*", "*")]
MATH_WRAPPERS = ["\\mathbf", "\\mathit", "\\boldsymbol"]


def stylize(source: str, rng: random.Random) -> str:
    """Wrap random words in emphasis and random letters in formulas in font commands."""
    parts = re.split(r"(\$\$.*?\$\$|\$.*?\$)", source, flags=re.S)
    out = []
    for part in parts:
        if part.startswith("$"):
            out.append(re.sub(r"(?<![\\a-zA-Z])([a-z])(?![a-zA-Z{])",
                              lambda m: f"{rng.choice(MATH_WRAPPERS)}{{{m.group(1)}}}"
                              if rng.random() < 0.3 else m.group(1), part))
        else:
            out.append(re.sub(r"(?<![\w#])([^\W\d_]{2,})\b",
                              lambda m: "{0}{1}{2}".format(
                                  *(lambda w: (w[0], m.group(1), w[1]))(rng.choice(STYLE_WRAPPERS)))
                              if rng.random() < 0.3 else m.group(1), part))
    return "".join(out)


def test_styling_invariance_tokens_and_trees():
    rng = random.Random(9)
    for name in ("tt1_v1.md", "tt1_v2.md", "tt2_left.md"):
        plain = load_document(fixture_text(name))
        for _ in range(5):
            styled_src = stylize(fixture_text(name), rng)
            assert styled_src != fixture_text(name)
            styled = load_document(styled_src)
            assert [w for w in styled.text_stream()[0]] == plain.text_stream()[0]
            assert [f.ast for f in styled.formulas] == [f.ast for f in plain.formulas]
