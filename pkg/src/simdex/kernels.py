"""Hot loops of the word-run finder, in two interchangeable backends.

``SIMDEX_BACKEND=numba`` (the default when numba imports) compiles the loops
with ``@njit``; ``SIMDEX_BACKEND=numpy`` runs vectorized numpy code instead.
Both backends return identical arrays.

Token streams are int64 arrays; negative ids are breaks that never match.
"""

from __future__ import annotations

import os

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

HASH_BASE = np.uint64(0x100000001B3)

_backend = "numba" if HAVE_NUMBA else "numpy"


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


def backend() -> str:
    return _backend


if os.environ.get("SIMDEX_BACKEND"):
    set_backend(os.environ["SIMDEX_BACKEND"].strip().lower())


# --------------------------------------------------------------------------
# numba

@njit(cache=True, nogil=True)
def _window_hashes_nb(ids, width):
    n = ids.shape[0] - width + 1
    hashes = np.zeros(max(n, 0), dtype=np.uint64)
    valid = np.zeros(max(n, 0), dtype=np.bool_)
    if n <= 0:
        return hashes, valid
    top = np.uint64(1)
    for _ in range(width - 1):
        top = top * HASH_BASE
    h = np.uint64(0)
    bad = 0
    for k in range(width):
        h = h * HASH_BASE + np.uint64(max(ids[k], 0))
        if ids[k] < 0:
            bad += 1
    hashes[0] = h
    valid[0] = bad == 0
    for i in range(1, n):
        out = ids[i - 1]
        new = ids[i + width - 1]
        h = (h - np.uint64(max(out, 0)) * top) * HASH_BASE + np.uint64(max(new, 0))
        if out < 0:
            bad -= 1
        if new < 0:
            bad += 1
        hashes[i] = h
        valid[i] = bad == 0
    return hashes, valid


@njit(cache=True, nogil=True)
def _best_extensions_nb(a, b, starts, lo, hi, order, width):
    m = starts.shape[0]
    best_len = np.zeros(m, dtype=np.int64)
    best_pos = np.full(m, -1, dtype=np.int64)
    na = a.shape[0]
    nb = b.shape[0]
    for r in range(m):
        i = starts[r]
        for c in range(lo[r], hi[r]):
            p = order[c]
            if i > 0 and p > 0 and a[i - 1] >= 0 and a[i - 1] == b[p - 1]:
                continue  # same end as the pair one step left
            k = 0
            while i + k < na and p + k < nb and a[i + k] >= 0 and a[i + k] == b[p + k]:
                k += 1
            if k < width:
                continue  # hash collision
            if k > best_len[r] or (k == best_len[r] and p < best_pos[r]):
                best_len[r] = k
                best_pos[r] = p
    return best_len, best_pos


# --------------------------------------------------------------------------
# numpy

def _window_hashes_np(ids, width):
    n = ids.shape[0] - width + 1
    if n <= 0:
        return np.zeros(0, dtype=np.uint64), np.zeros(0, dtype=bool)
    windows = sliding_window_view(np.maximum(ids, 0).astype(np.uint64), width)
    powers = np.ones(width, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for k in range(width - 2, -1, -1):
            powers[k] = powers[k + 1] * HASH_BASE
        hashes = (windows * powers).sum(axis=1, dtype=np.uint64)
    neg = np.concatenate(([0], np.cumsum(ids < 0)))
    valid = (neg[width:] - neg[:-width]) == 0
    return hashes, valid


_PAIR_CHUNK = 1 << 20


def _best_extensions_np(a, b, starts, lo, hi, order, width):
    m = starts.shape[0]
    best_len = np.zeros(m, dtype=np.int64)
    best_pos = np.full(m, -1, dtype=np.int64)
    counts = hi - lo
    if not counts.sum():
        return best_len, best_pos
    a_pad = np.concatenate((a, [-1]))
    b_pad = np.concatenate((b, [-2]))
    # rows are processed in slices holding about _PAIR_CHUNK candidate pairs
    ends = np.cumsum(counts)
    r0 = 0
    while r0 < m:
        r1 = int(np.searchsorted(ends, (ends[r0 - 1] if r0 else 0) + _PAIR_CHUNK, side="right"))
        r1 = min(max(r1, r0 + 1), m)
        _extend_rows(a, b, a_pad, b_pad, starts, lo, counts, order, width, r0, r1,
                     best_len, best_pos)
        r0 = r1
    return best_len, best_pos


def _extend_rows(a, b, a_pad, b_pad, starts, lo, counts, order, width, r0, r1,
                 best_len, best_pos):
    cnt = counts[r0:r1]
    total = int(cnt.sum())
    if total == 0:
        return
    row = np.repeat(np.arange(r0, r1), cnt)
    offsets = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    pa = starts[row]
    pb = order[lo[row] + offsets]
    # drop pairs that continue a match from the left: they end where that match ends
    prev_a = np.where(pa > 0, a[np.maximum(pa - 1, 0)], -1)
    prev_b = np.where(pb > 0, b[np.maximum(pb - 1, 0)], -2)
    left_max = (prev_a < 0) | (prev_a != prev_b)
    row, pa, pb = row[left_max], pa[left_max], pb[left_max]
    # extend every (A start, B start) pair one token per round
    length = np.zeros(row.size, dtype=np.int64)
    active = np.arange(row.size)
    while active.size:
        ia = np.minimum(pa[active] + length[active], a.shape[0])
        ib = np.minimum(pb[active] + length[active], b.shape[0])
        x, y = a_pad[ia], b_pad[ib]
        active = active[(x >= 0) & (x == y)]
        length[active] += 1
    keep = length >= width
    row, pb, length = row[keep], pb[keep], length[keep]
    if row.size:
        # per row: longest length, then lowest B position
        sel = np.lexsort((pb, -length, row))
        row, pb, length = row[sel], pb[sel], length[sel]
        first = np.ones(row.size, dtype=bool)
        first[1:] = row[1:] != row[:-1]
        best_len[row[first]] = length[first]
        best_pos[row[first]] = pb[first]


# --------------------------------------------------------------------------

def window_hashes(ids: np.ndarray, width: int) -> tuple[np.ndarray, np.ndarray]:
    """Polynomial hash (mod 2**64) of every ``width``-token window, and a flag
    telling whether the window is free of breaks."""
    ids = np.ascontiguousarray(ids, dtype=np.int64)
    if _backend == "numba":
        return _window_hashes_nb(ids, width)
    return _window_hashes_np(ids, width)


def best_extensions(a, b, starts, lo, hi, order, width):
    """For each A start, the longest verified common run against the candidate
    B starts ``order[lo:hi]`` and the lowest B position achieving it.

    Only left-maximal pairs are extended (the tokens before them differ, or
    one side is at a break or at its start). A pair that continues a match
    from the left ends where that match ends, so it can never extend the
    covered region; skipping it keeps identical inputs linear. Runs shorter
    than ``width`` (hash collisions) are discarded: length 0, position -1.
    """
    args = [np.ascontiguousarray(x, dtype=np.int64) for x in (a, b, starts, lo, hi, order)]
    if _backend == "numba":
        return _best_extensions_nb(*args, width)
    return _best_extensions_np(*args, width)
