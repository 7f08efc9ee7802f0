"""Independent reference computations used to fix expected values.

Nothing here imports the engine's tokenizer, run finder or parser. Text is
split with a plain regex, runs are found by enumerating every substring and
formula weights come from leaf lists written out by hand.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "simdex" / "fixtures" / "data"
STOP_TERMS = Path(__file__).resolve().parents[1] / "src" / "simdex" / "data" / "stop_terms.txt"

BREAK = None


def naive_words(source: str) -> list:
    """Words of the prose with a break wherever a ``$``-delimited region sat."""
    out = []
    for i, chunk in enumerate(re.split(r"\$\$.*?\$\$|\$.*?\$", source, flags=re.S)):
        if i:
            out.append(BREAK)
        out.extend(w.lower() for w in re.findall(r"[^\W_]+", chunk))
    # collapse repeated or leading breaks
    clean = []
    for w in out:
        if w is BREAK and (not clean or clean[-1] is BREAK):
            continue
        clean.append(w)
    return clean


def naive_stop_terms() -> list[tuple[str, ...]]:
    terms = []
    for line in STOP_TERMS.read_text("utf-8").splitlines():
        line = line.split("#", 1)[0]
        words = tuple(w.lower() for w in re.findall(r"[^\W_]+", line))
        if words and words not in terms:
            terms.append(words)
    return terms


def naive_mask(words: list, terms) -> list:
    """Blank out every position covered by some occurrence of some term."""
    covered = set()
    for t in terms:
        for i in range(len(words) - len(t) + 1):
            if tuple(words[i:i + len(t)]) == t:
                covered.update(range(i, i + len(t)))
    return [BREAK if i in covered else w for i, w in enumerate(words)]


def brute_matched(a: list, b: list, min_run: int) -> int:
    """Positions of A inside some substring of length >= min_run also present in B."""
    grams = set()
    for i in range(len(b)):
        for j in range(i + min_run, len(b) + 1):
            if BREAK in b[i:j]:
                break
            grams.add(tuple(b[i:j]))
    covered = [False] * len(a)
    for i in range(len(a)):
        for j in range(i + min_run, len(a) + 1):
            if BREAK in a[i:j]:
                break
            if tuple(a[i:j]) in grams:
                for k in range(i, j):
                    covered[k] = True
    return sum(covered)


# Hand-written leaf lists of the Test Task 1 formulas in document order. Display
# tags and trailing punctuation are not part of a formula; each prime is one leaf.
TT1_V1_FORMULAS = [
    ("u_t = au_{xx} + bu ln bar(u) + cu", "u t = a u x x + b u ln bar u + c u"),
    ("bar(u) = u(px, qt)", "bar u = u p x , q t"),
    ("0 < p, q < 1", "0 < p , q < 1"),
    ("u(x, t) = f(x)g(t)", "u x , t = f x g t"),
    ("f = f(x)", "f = f x"),
    ("g = g(t)", "g = g t"),
    ("aligned system v1",
     "a f ′ ′ x x + b f ln bar f + k f = 0 g ′ t − b g ln bar g + k − c g = 0"),
    ("bar(f) = f(px)", "bar f = f p x"),
    ("bar(g) = g(qt)", "bar g = g q t"),
]
TT1_V2_FORMULAS = [
    ("u_tt = au_{xx} + bu ln u + cu", "u t t = a u x x + b u ln u + c u"),
    ("u(x, t) = f(x)g(t)", "u x , t = f x g t"),
    ("f = f(x)", "f = f x"),
    ("g = g(t)", "g = g t"),
    ("aligned system v2",
     "a f ′ ′ x x + b f ln f + k f = 0 g ′ ′ t t − b g ln g + k − c g = 0"),
]


# Labels were compared pairwise by eye; equal labels mean identical formulas.
def _formula_match(a, b) -> tuple[int, int]:
    labels_b = {label for label, _ in b}
    matched = sum(len(leaves.split()) for label, leaves in a if label in labels_b)
    return matched, sum(len(leaves.split()) for _, leaves in a)


def round_half_up(x: Fraction) -> float:
    return int(x * 10 + Fraction(1, 2)) / 10


def tt1_oracle(min_run: int = 8, ratio: int = 7, masked: bool = True) -> dict:
    v1 = naive_words((FIXTURES / "tt1_v1.md").read_text("utf-8"))
    v2 = naive_words((FIXTURES / "tt1_v2.md").read_text("utf-8"))
    if masked:
        terms = naive_stop_terms()
        v1, v2 = naive_mask(v1, terms), naive_mask(v2, terms)
    out = {}
    for name, (a, b, fa, fb) in {"v1_v2": (v1, v2, TT1_V1_FORMULAS, TT1_V2_FORMULAS),
                                 "v2_v1": (v2, v1, TT1_V2_FORMULAS, TT1_V1_FORMULAS)}.items():
        words = sum(w is not BREAK for w in a)
        text_hit = brute_matched(a, b, min_run)
        f_hit, f_total = _formula_match(fa, fb)
        index = Fraction(100 * (text_hit + ratio * f_hit), words + ratio * f_total)
        out[name] = {"words": words, "text_matched": text_hit, "formula_matched": f_hit,
                     "formula_total": f_total, "variant1": round_half_up(Fraction(100 * f_hit, f_total)),
                     "index": round_half_up(index)}
    return out


if __name__ == "__main__":
    import json
    print(json.dumps({"variant3": tt1_oracle(), "variant2": tt1_oracle(masked=False)}, indent=1))
