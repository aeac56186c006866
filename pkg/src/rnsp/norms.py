"""Scaled partial sums and multiresolution sup-norms over interval systems.

Two interval systems are used:

* the *full* system: every closed subinterval of [1, n], singletons included
  (O(n^2) members);
* the *anchored* system: the n-1 prefixes [1,2], [1,3], ..., [1,n] together
  with the n-1 suffixes [1,n], [2,n], ..., [n-1,n] (O(n) members).

The anchored system is a subset of the full one, so its norm never exceeds
the full norm; the detection engine exploits this to stay fast without
weakening any coverage guarantee.

The functions accept arbitrary finite numeric vectors.  The detection code
feeds them sign vectors (entries in {-1, 0, +1}), for which all partial sums
are exact small integers and results are bit-reproducible.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyOrTooShortError, IndexOutOfRangeError, SegmentTooShortError


def prefix_sums(x: np.ndarray) -> np.ndarray:
    """Cumulative sums with a leading zero: c[0] = 0, c[k] = x_1 + ... + x_k."""
    x = np.asarray(x, dtype=np.float64)
    c = np.empty(x.shape[0] + 1, dtype=np.float64)
    c[0] = 0.0
    np.cumsum(x, out=c[1:])
    return c


def scaled_partial_sum(p: np.ndarray, s: int, e: int) -> float:
    """(c_e - c_{s-1}) / sqrt(e - s + 1) for 1-based closed [s, e].

    ``p`` is the output of :func:`prefix_sums`.
    """
    n = p.shape[0] - 1
    if not (1 <= s <= e <= n):
        raise IndexOutOfRangeError(f"interval [{s}, {e}] outside [1, {n}]")
    return float((p[e] - p[s - 1]) / np.sqrt(e - s + 1))


def msup_norm_all(x: np.ndarray) -> float:
    """Max of |scaled partial sum| over every subinterval of [1, n].

    O(n^2) time, O(n) memory, via prefix sums.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] < 1:
        raise EmptyOrTooShortError("norm of an empty vector is undefined")
    return float(msup_norm_all_rows(x[None, :])[0])


def msup_norm_all_rows(rows: np.ndarray) -> np.ndarray:
    """Row-wise full-system norms of a 2-d array (one vector per row)."""
    rows = np.asarray(rows, dtype=np.float64)
    r, n = rows.shape
    c = np.zeros((r, n + 1), dtype=np.float64)
    np.cumsum(rows, axis=1, out=c[:, 1:])
    best = np.zeros(r, dtype=np.float64)
    for length in range(1, n + 1):
        sums = c[:, length:] - c[:, : n - length + 1]
        np.abs(sums, out=sums)
        np.maximum(best, sums.max(axis=1) / np.sqrt(length), out=best)
    return best


def msup_norm_lr(x: np.ndarray) -> float:
    """Max of |scaled partial sum| over the anchored (prefix/suffix) system.

    O(n) time; requires n >= 2 (the system's shortest members have length 2).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] < 2:
        raise SegmentTooShortError("anchored norm needs at least 2 entries")
    return float(msup_norm_lr_rows(x[None, :])[0])


def msup_norm_lr_rows(rows: np.ndarray) -> np.ndarray:
    """Row-wise anchored-system norms of a 2-d array (one vector per row).

    Shared kernel for :func:`msup_norm_lr` and the constant-fit deviation
    search, which evaluates many candidate sign vectors on one segment.
    """
    rows = np.asarray(rows, dtype=np.float64)
    r, n = rows.shape
    if n < 2:
        raise SegmentTooShortError("anchored norm needs at least 2 entries")
    c = np.cumsum(rows, axis=1)
    # prefixes [1, L] for L = 2..n
    left = np.abs(c[:, 1:]) / np.sqrt(np.arange(2, n + 1, dtype=np.float64))
    best = left.max(axis=1)
    if n > 2:
        # suffixes [i, n] for i = 2..n-1 (the suffix [1, n] equals the last prefix)
        totals = c[:, -1][:, None]
        right = np.abs(totals - c[:, : n - 2]) / np.sqrt(
            np.arange(n - 1, 1, -1, dtype=np.float64)
        )
        np.maximum(best, right.max(axis=1), out=best)
    return best
