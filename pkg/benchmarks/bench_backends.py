"""Time the word-run finder and a full comparison on the numba and numpy backends.

    python3 benchmarks/bench_backends.py [--words 10000] [--formulas 200] [--repeat 5]
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from synth import make_source  # noqa: E402

from simdex import kernels  # noqa: E402
from simdex.docmodel import load_document  # noqa: E402
from simdex.index import variant3_index  # noqa: E402
from simdex.text_match import find_matched_runs, matched_word_count  # noqa: E402


def _time(fn, repeat: int) -> float:
    samples = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t)
    return statistics.median(samples)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--words", type=int, default=10_000)
    ap.add_argument("--formulas", type=int, default=200)
    ap.add_argument("--shared", type=int, default=2_000, help="length of a word run common to both")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    shared = " ".join(f"s{i}" for i in range(args.shared))
    src_a = make_source(args.words, args.formulas, 1, shared=shared)
    src_b = make_source(args.words, args.formulas, 2, shared=shared)
    t = time.perf_counter()
    doc_a, doc_b = load_document(src_a, doc_id="a"), load_document(src_b, doc_id="b")
    print(f"parse both documents: {time.perf_counter() - t:.3f} s "
          f"({doc_a.word_count} words, {len(doc_a.formulas)} formulas each)")
    words_a, _ = doc_a.text_stream()
    words_b, _ = doc_b.text_stream()

    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    results = {}
    for name in backends:
        kernels.set_backend(name)
        t = time.perf_counter()
        runs = find_matched_runs(words_a, words_b)  # includes compilation for numba
        first = time.perf_counter() - t
        runs_t = _time(lambda: find_matched_runs(words_a, words_b), args.repeat)
        full_t = _time(lambda: variant3_index(doc_a, doc_b), args.repeat)
        results[name] = matched_word_count(runs, words_a)
        print(f"{name:>6}: first call {first:.3f} s | run finder {runs_t * 1e3:7.2f} ms | "
              f"variant 3 comparison {full_t * 1e3:7.2f} ms | matched {results[name]}")
    if len(set(results.values())) > 1:
        print("backends disagree:", results)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
