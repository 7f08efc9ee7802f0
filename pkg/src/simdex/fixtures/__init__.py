"""Built-in fixture corpus with expected outcomes.

Every case carries a provenance tag: ``published`` when the expected value is
stated in the source publication, ``derived`` when it was fixed in advance
by an independent oracle, ``trivial`` when the definitions force it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib.resources import files
from typing import Any, Callable, Optional

from ..docmodel import FORMULA, Document, load_document
from ..formula_match import (MatchMode, alpha_equal, baseline_fragment_index,
                             baseline_letter_fragment_index, strict_equal)
from ..index import variant1_index, variant2_index, variant3_index
from ..mathparse import parse_normalized

PUBLISHED, DERIVED, TRIVIAL = "published", "derived", "trivial"


def fixture_text(name: str) -> str:
    return files(__name__).joinpath("data", name).read_text("utf-8")


@lru_cache(maxsize=None)
def fixture_document(name: str) -> Document:
    return load_document(fixture_text(name), doc_id=name)


_ROW_RE = re.compile(r"^(\d+)\.\s+\$(.*)\$\s*$", re.M)


@lru_cache(maxsize=None)
def tt2_rows() -> tuple[tuple[int, str, str], ...]:
    """(row number, left formula source, right formula source) for all 30 rows."""
    left = dict((int(n), s) for n, s in _ROW_RE.findall(fixture_text("tt2_left.md")))
    right = dict((int(n), s) for n, s in _ROW_RE.findall(fixture_text("tt2_right.md")))
    return tuple((n, left[n], right[n]) for n in sorted(left))


@dataclass(frozen=True)
class FixtureCase:
    id: str
    documents: tuple[str, ...]
    expected: Any
    provenance: str
    run: Callable[[], Any] = field(compare=False, repr=False)
    check: Optional[Callable[[Any], bool]] = field(default=None, compare=False, repr=False)
    note: str = ""

    def evaluate(self) -> tuple[bool, Any]:
        observed = self.run()
        ok = self.check(observed) if self.check else observed == self.expected
        return bool(ok), observed


def _pair_inequal(a: str, b: str) -> dict:
    x, y = parse_normalized(a), parse_normalized(b)
    return {"strict": strict_equal(x, y), "alpha": alpha_equal(x, y)}


def _tt2_row_case(n: int, left: str, right: str) -> FixtureCase:
    return FixtureCase(
        f"tt2-row-{n:02d}", ("tt2_left.md", "tt2_right.md"), False, PUBLISHED,
        lambda: strict_equal(parse_normalized(left), parse_normalized(right)),
        note=f"{left}  vs  {right}")


def _index(fn, a: str, b: str, **kw):
    return lambda: fn(fixture_document(a), fixture_document(b), **kw).index


def _channel(fn, a: str, b: str, name: str, **kw):
    def run():
        ch = fn(fixture_document(a), fixture_document(b), **kw).channels[name]
        return (ch.matched_units, ch.total_units)
    return run


# Expected values of the Test Task 1 comparisons, fixed by the independent
# oracle (regex tokenizer, substring enumeration, hand-listed formula leaves).
TT1_EXPECTED = {
    ("tt1_v1.md", "tt1_v2.md"): {"variant1": 18.1, "variant2": 20.7, "variant3": 20.8,
                                 "text": (29, 54), "formula": (17, 94)},
    ("tt1_v2.md", "tt1_v1.md"): {"variant1": 25.8, "variant2": 29.0, "variant3": 29.1,
                                 "text": (29, 47), "formula": (17, 66)},
}

EXAMPLE_PAIRS = {
    "example-1": ("g = 1 + |z| + |f|^{1/2}", "g = (1 + |z| + |f|)^{1/2}"),
    "example-2": ("y = a + bx^{-1/2}", "y = a + bx - 1/2"),
    "eq1-parabolic-hyperbolic": ("u_t = [f(u)u_x]_x + g(u)", "u_{tt} = [f(u)u_x]_x + g(u)"),
}

DREAM_PAIR = ("u_t = a u_{xx}", "u_{tt} = a u_{xx}")
PHRASES = ("Современное движение за мир", "Военное положение закончилось")


def build_cases() -> list[FixtureCase]:
    cases = [_tt2_row_case(*row) for row in tt2_rows()]
    cases += [
        FixtureCase("tt2-variant1-right-left", ("tt2_right.md", "tt2_left.md"), 0.0, PUBLISHED,
                    _index(variant1_index, "tt2_right.md", "tt2_left.md", mode=MatchMode.STRICT)),
        FixtureCase("tt2-variant1-left-right", ("tt2_left.md", "tt2_right.md"), 0.0, PUBLISHED,
                    _index(variant1_index, "tt2_left.md", "tt2_right.md", mode=MatchMode.STRICT)),
        FixtureCase("tt2-all-parse", ("tt2_left.md", "tt2_right.md"), 60, TRIVIAL,
                    lambda: sum(s.payload.error is None
                                for n in ("tt2_left.md", "tt2_right.md")
                                for s in fixture_document(n).segments if s.kind == FORMULA)),
    ]
    for cid, (a, b) in EXAMPLE_PAIRS.items():
        cases.append(FixtureCase(cid, (), {"strict": False, "alpha": False}, PUBLISHED,
                                 lambda a=a, b=b: _pair_inequal(a, b), note=f"{a}  vs  {b}"))
    cases += [
        FixtureCase("legacy-dream-fragment", (), 87.5, PUBLISHED,
                    lambda: baseline_fragment_index(parse_normalized(DREAM_PAIR[0]),
                                                    parse_normalized(DREAM_PAIR[1])),
                    note="LEGACY fragment baseline"),
        FixtureCase("legacy-letter-fragment", (), 50.0, PUBLISHED,
                    lambda: baseline_letter_fragment_index(*PHRASES),
                    note="LEGACY letter-fragment baseline"),
    ]
    for (a, b), exp in TT1_EXPECTED.items():
        tag = f"tt1-{a[4:6]}-{b[4:6]}"
        for variant, fn in (("variant1", variant1_index), ("variant2", variant2_index),
                            ("variant3", variant3_index)):
            cases.append(FixtureCase(f"{tag}-{variant}", (a, b), exp[variant], DERIVED,
                                     _index(fn, a, b)))
        cases.append(FixtureCase(f"{tag}-text-channel", (a, b), exp["text"], DERIVED,
                                 _channel(variant3_index, a, b, "text")))
        cases.append(FixtureCase(f"{tag}-formula-channel", (a, b), exp["formula"], DERIVED,
                                 _channel(variant3_index, a, b, "formula")))
        cases.append(FixtureCase(f"{tag}-below-half", (a, b), "<= 50", PUBLISHED,
                                 _index(variant3_index, a, b), check=lambda v: v <= 50.0,
                                 note="contrast with fragment-based 69% / 93%"))
    cases += [
        FixtureCase("catdog-figure-channel", ("catdog_a.md", "catdog_b.md"), (0, 14), PUBLISHED,
                    _channel(variant3_index, "catdog_a.md", "catdog_b.md", "figure")),
        FixtureCase("catdog-below-100", ("catdog_a.md", "catdog_b.md"), "< 100", PUBLISHED,
                    _index(variant3_index, "catdog_a.md", "catdog_b.md"),
                    check=lambda v: v < 100.0),
        FixtureCase("metadata-zones-a-b", ("metadata_a.md", "metadata_b.md"), 0.0, DERIVED,
                    _index(variant3_index, "metadata_a.md", "metadata_b.md")),
        FixtureCase("metadata-zones-b-a", ("metadata_b.md", "metadata_a.md"), 0.0, DERIVED,
                    _index(variant3_index, "metadata_b.md", "metadata_a.md")),
        FixtureCase("literature-excluded-entries", ("literature.md",), 19, DERIVED,
                    lambda: sum(1 for s in fixture_document("literature.md").segments
                                if s.excluded and s.kind != "heading")),
    ]
    return cases


def select(cases: list[FixtureCase], substring: Optional[str]) -> list[FixtureCase]:
    if not substring:
        return cases
    return [c for c in cases if substring.lower() in c.id.lower()]
