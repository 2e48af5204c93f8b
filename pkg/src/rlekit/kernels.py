"""Hot numeric kernels: per-feature medians and per-sample boxplot summaries.

Two interchangeable backends compute identical results:

* a numba ``@njit`` path (default when numba imports cleanly) built on
  in-place multi-quickselect -- a summary needs only a handful of order
  statistics, so selection in O(n) beats a full sort for wide rows; and
* a pure-numpy fallback that simply sorts each row.

Selection happens once at import from the ``RLEKIT_NUMBA`` environment
variable: ``0``/``false``/``off`` forces numpy, ``1``/``true``/``on``
requires numba, anything else auto-detects. Both paths share the same
scalar quantile/median formulas and return bit-identical results;
summaries are computed row by row with O(n) scratch per sample, never
materialising an m x n intermediate.

``benchmarks/bench_kernels.py`` times the two paths against each other.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = ["backend", "column_medians", "row_summaries", "METHOD_CODES"]

# Quantile method codes shared by both backends.
METHOD_CODES = {"linear": 0, "hinges": 1}


# ---------------------------------------------------------------------------
# Scalar helpers on sorted data, used by the numpy backend and by tests.

def _sorted_median(srt):
    n = srt.shape[0]
    h = n // 2
    if n % 2 == 1:
        return srt[h]
    return (srt[h - 1] + srt[h]) / 2.0


def _sorted_quantile(srt, q):
    # Type-7: linear interpolation of order statistics at q * (n - 1).
    n = srt.shape[0]
    pos = q * (n - 1)
    lo = int(math.floor(pos))
    if lo >= n - 1:
        return srt[n - 1]
    frac = pos - lo
    return srt[lo] + frac * (srt[lo + 1] - srt[lo])


def _sorted_hinges(srt):
    # Tukey hinges: medians of the lower/upper halves, the median itself
    # included in both halves when the count is odd.
    n = srt.shape[0]
    half = (n + 1) // 2
    return _sorted_median(srt[:half]), _sorted_median(srt[n - half:])


def _row_stats_sorted(srt, method, coef):
    """Seven numbers for one sorted row: med, q1, q3, wlo, whi, k_lo, k_hi.

    k_lo/k_hi count points below/above the Tukey fences; whiskers snap to
    the most extreme points inside the fences.
    """
    n = srt.shape[0]
    med = _sorted_median(srt)
    if method == 1:
        q1, q3 = _sorted_hinges(srt)
    else:
        q1 = _sorted_quantile(srt, 0.25)
        q3 = _sorted_quantile(srt, 0.75)
    iqr = q3 - q1
    fence_lo = q1 - coef * iqr
    fence_hi = q3 + coef * iqr
    k_lo = 0
    while k_lo < n and srt[k_lo] < fence_lo:
        k_lo += 1
    k_hi = 0
    while k_hi < n and srt[n - 1 - k_hi] > fence_hi:
        k_hi += 1
    wlo = srt[k_lo] if k_lo < n else q1
    whi = srt[n - 1 - k_hi] if k_hi < n else q3
    return med, q1, q3, wlo, whi, k_lo, k_hi


def _needed_indices(n, method):
    """Order-statistic indices a summary of n values depends on, ascending."""
    idx = set()
    h = n // 2
    idx.add(h)
    if n % 2 == 0:
        idx.add(h - 1)
    if method == 1:
        half = (n + 1) // 2
        base = n - half
        if half % 2 == 1:
            idx.add((half - 1) // 2)
            idx.add(base + (half - 1) // 2)
        else:
            idx.update((half // 2 - 1, half // 2,
                        base + half // 2 - 1, base + half // 2))
    else:
        for q in (0.25, 0.75):
            lo = int(math.floor(q * (n - 1)))
            idx.add(lo)
            idx.add(min(lo + 1, n - 1))
    return np.array(sorted(idx), dtype=np.int64)


# ---------------------------------------------------------------------------
# numpy backend

def _column_medians_numpy(values):
    return np.median(values, axis=0)


def _row_summaries_numpy(values, center, method, coef):
    m, n = values.shape
    stats = np.empty((m, 5))
    k_lo = np.empty(m, dtype=np.int64)
    k_hi = np.empty(m, dtype=np.int64)
    sorted_rows = []
    for i in range(m):
        srt = np.sort(values[i] - center)
        med, q1, q3, wlo, whi, klo, khi = _row_stats_sorted(srt, method, coef)
        stats[i] = med, q1, q3, wlo, whi
        k_lo[i] = klo
        k_hi[i] = khi
        sorted_rows.append(srt)
    offsets = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(k_lo + k_hi, out=offsets[1:])
    outliers = np.empty(offsets[-1])
    for i in range(m):
        srt = sorted_rows[i]
        pos = offsets[i]
        outliers[pos:pos + k_lo[i]] = srt[:k_lo[i]]
        pos += k_lo[i]
        if k_hi[i]:
            outliers[pos:pos + k_hi[i]] = srt[n - k_hi[i]:]
    return stats, outliers, offsets


# ---------------------------------------------------------------------------
# numba backend

def _build_numba():
    from numba import njit, prange

    n_buckets = 1024

    @njit(cache=True)
    def place_order_stat(buf, k, left, right):
        # In-place quickselect: afterwards buf[k] holds the k-th smallest of
        # buf[left..right] and everything left of k is <= it. Median-of-3
        # pivot, with a plain min-scan when k is the first index of the range.
        while True:
            if k == left:
                mi = left
                for t in range(left + 1, right + 1):
                    if buf[t] < buf[mi]:
                        mi = t
                tmp = buf[left]
                buf[left] = buf[mi]
                buf[mi] = tmp
                return
            if left >= right:
                return
            mid = (left + right) // 2
            a = buf[left]
            b = buf[mid]
            c = buf[right]
            if a > b:
                a, b = b, a
            if b > c:
                b, c = c, b
            if a > b:
                a, b = b, a
            pivot = b
            i = left
            j = right
            while i <= j:
                while buf[i] < pivot:
                    i += 1
                while buf[j] > pivot:
                    j -= 1
                if i <= j:
                    tmp = buf[i]
                    buf[i] = buf[j]
                    buf[j] = tmp
                    i += 1
                    j -= 1
            if k <= j:
                right = j
            elif k >= i:
                left = i
            else:
                return

    @njit(cache=True)
    def insertion_sort(arr, lo, hi):
        for a in range(lo + 1, hi):
            x = arr[a]
            b = a - 1
            while b >= lo and arr[b] > x:
                arr[b + 1] = arr[b]
                b -= 1
            arr[b + 1] = x

    @njit(cache=True)
    def select_order_stats(row, ks, out_vals):
        # out_vals[t] := the ks[t]-th smallest element of row (ks ascending),
        # without mutating row. One bucket-count pass narrows each target to a
        # small candidate set; only the candidates are gathered and selected.
        n = row.shape[0]
        mn = row[0]
        mx = row[0]
        for j in range(1, n):
            x = row[j]
            if x < mn:
                mn = x
            if x > mx:
                mx = x
        if mn == mx:
            for t in range(ks.shape[0]):
                out_vals[t] = mn
            return
        scale = n_buckets / (mx - mn)
        if not np.isfinite(scale):
            buf = row.copy()
            left = 0
            for t in range(ks.shape[0]):
                place_order_stat(buf, ks[t], left, n - 1)
                left = ks[t] + 1
                out_vals[t] = buf[ks[t]]
            return
        counts = np.zeros(n_buckets, np.int64)
        for j in range(n):
            idx = int((row[j] - mn) * scale)
            if idx >= n_buckets:
                idx = n_buckets - 1
            counts[idx] += 1
        start = np.zeros(n_buckets + 1, np.int64)
        for b in range(n_buckets):
            start[b + 1] = start[b] + counts[b]
        # buckets holding a target, in first-need order
        n_ks = ks.shape[0]
        slot = np.full(n_buckets, -1, np.int64)
        slot_bucket = np.empty(n_ks, np.int64)
        n_slots = 0
        for t in range(n_ks):
            b = np.searchsorted(start, ks[t], side="right") - 1
            if slot[b] < 0:
                slot[b] = n_slots
                slot_bucket[n_slots] = b
                n_slots += 1
        seg_off = np.zeros(n_slots + 1, np.int64)
        for s in range(n_slots):
            seg_off[s + 1] = seg_off[s] + counts[slot_bucket[s]]
        scratch = np.empty(seg_off[n_slots])
        pos = seg_off[:n_slots].copy()
        for j in range(n):
            x = row[j]
            idx = int((x - mn) * scale)
            if idx >= n_buckets:
                idx = n_buckets - 1
            s = slot[idx]
            if s >= 0:
                scratch[pos[s]] = x
                pos[s] += 1
        seg_left = np.zeros(n_slots, np.int64)
        for t in range(n_ks):
            k = ks[t]
            b = np.searchsorted(start, k, side="right") - 1
            s = slot[b]
            seg = scratch[seg_off[s]:seg_off[s + 1]]
            r = k - start[b]
            place_order_stat(seg, r, seg_left[s], seg.shape[0] - 1)
            seg_left[s] = r + 1
            out_vals[t] = seg[r]

    @njit(cache=True)
    def val_at(ks, vals, k):
        for t in range(ks.shape[0]):
            if ks[t] == k:
                return vals[t]
        return vals[0]  # unreachable: ks covers every requested index

    @njit(cache=True)
    def stats_from_vals(ks, vals, n, method):
        h = n // 2
        if n % 2 == 1:
            med = val_at(ks, vals, h)
        else:
            med = (val_at(ks, vals, h - 1) + val_at(ks, vals, h)) / 2.0
        if method == 1:
            half = (n + 1) // 2
            base = n - half
            if half % 2 == 1:
                q1 = val_at(ks, vals, (half - 1) // 2)
                q3 = val_at(ks, vals, base + (half - 1) // 2)
            else:
                q1 = (val_at(ks, vals, half // 2 - 1) + val_at(ks, vals, half // 2)) / 2.0
                q3 = (val_at(ks, vals, base + half // 2 - 1)
                      + val_at(ks, vals, base + half // 2)) / 2.0
        else:
            pos = 0.25 * (n - 1)
            lo = int(math.floor(pos))
            if lo >= n - 1:
                q1 = val_at(ks, vals, n - 1)
            else:
                q1 = val_at(ks, vals, lo) + (pos - lo) * (
                    val_at(ks, vals, lo + 1) - val_at(ks, vals, lo))
            pos = 0.75 * (n - 1)
            lo = int(math.floor(pos))
            if lo >= n - 1:
                q3 = val_at(ks, vals, n - 1)
            else:
                q3 = val_at(ks, vals, lo) + (pos - lo) * (
                    val_at(ks, vals, lo + 1) - val_at(ks, vals, lo))
        return med, q1, q3

    @njit(cache=True, parallel=True)
    def column_medians(values):
        m, n = values.shape
        h = m // 2
        odd = m % 2 == 1
        out = np.empty(n)
        for j in prange(n):
            col = np.empty(m)
            for i in range(m):
                col[i] = values[i, j]
            if m <= 64:
                insertion_sort(col, 0, m)
            elif odd:
                place_order_stat(col, h, 0, m - 1)
            else:
                place_order_stat(col, h - 1, 0, m - 1)
                place_order_stat(col, h, h, m - 1)
            out[j] = col[h] if odd else (col[h - 1] + col[h]) / 2.0
        return out

    @njit(cache=True, parallel=True)
    def stats_pass(values, center, ks, method, coef, stats, fences, k_lo, k_hi):
        m, n = values.shape
        for i in prange(m):
            row = np.empty(n)
            for j in range(n):
                row[j] = values[i, j] - center[j]
            vals = np.empty(ks.shape[0])
            select_order_stats(row, ks, vals)
            med, q1, q3 = stats_from_vals(ks, vals, n, method)
            iqr = q3 - q1
            f_lo = q1 - coef * iqr
            f_hi = q3 + coef * iqr
            klo = 0
            khi = 0
            wlo = np.inf
            whi = -np.inf
            for j in range(n):
                x = row[j]
                if x < f_lo:
                    klo += 1
                elif x < wlo:
                    wlo = x
                if x > f_hi:
                    khi += 1
                elif x > whi:
                    whi = x
            if klo == n:
                wlo = q1
            if khi == n:
                whi = q3
            stats[i, 0] = med
            stats[i, 1] = q1
            stats[i, 2] = q3
            stats[i, 3] = wlo
            stats[i, 4] = whi
            fences[i, 0] = f_lo
            fences[i, 1] = f_hi
            k_lo[i] = klo
            k_hi[i] = khi

    @njit(cache=True, parallel=True)
    def outlier_pass(values, center, fences, k_lo, k_hi, offsets, out):
        m, n = values.shape
        for i in prange(m):
            nlo = k_lo[i]
            nhi = k_hi[i]
            if nlo + nhi == 0:
                continue
            f_lo = fences[i, 0]
            f_hi = fences[i, 1]
            a = offsets[i]
            b = offsets[i] + nlo
            for j in range(n):
                x = values[i, j] - center[j]
                if x < f_lo:
                    out[a] = x
                    a += 1
                elif x > f_hi:
                    out[b] = x
                    b += 1
            insertion_sort(out, offsets[i], offsets[i] + nlo)
            insertion_sort(out, offsets[i] + nlo, offsets[i] + nlo + nhi)

    def row_summaries(values, center, method, coef):
        m, n = values.shape
        stats = np.empty((m, 5))
        fences = np.empty((m, 2))
        k_lo = np.empty(m, dtype=np.int64)
        k_hi = np.empty(m, dtype=np.int64)
        ks = _needed_indices(n, method)
        stats_pass(values, center, ks, method, coef, stats, fences, k_lo, k_hi)
        offsets = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(k_lo + k_hi, out=offsets[1:])
        outliers = np.empty(offsets[-1])
        outlier_pass(values, center, fences, k_lo, k_hi, offsets, outliers)
        return stats, outliers, offsets

    return column_medians, row_summaries


def _select_backend():
    flag = os.environ.get("RLEKIT_NUMBA", "auto").strip().lower()
    if flag in {"0", "false", "off", "no"}:
        return "numpy", None
    try:
        impls = _build_numba()
    except ImportError:
        if flag in {"1", "true", "on", "yes"}:
            raise ImportError("RLEKIT_NUMBA requested numba but it is not importable")
        return "numpy", None
    return "numba", impls


_BACKEND, _NUMBA_IMPLS = _select_backend()


def backend() -> str:
    """Name of the active kernel backend: "numba" or "numpy"."""
    return _BACKEND


def column_medians(values: np.ndarray) -> np.ndarray:
    """Median of every column of a 2-D array."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    if _NUMBA_IMPLS is not None:
        return _NUMBA_IMPLS[0](values)
    return _column_medians_numpy(values)


def row_summaries(values: np.ndarray, center: np.ndarray, method: str, coef: float):
    """Boxplot summaries of every row of ``values - center``.

    Returns ``(stats, outliers, offsets)`` where ``stats[i]`` is
    ``(median, q1, q3, whisker_low, whisker_high)`` for row ``i`` and row
    ``i``'s outliers are ``outliers[offsets[i]:offsets[i + 1]]``, sorted
    ascending. Values must be finite.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    center = np.ascontiguousarray(center, dtype=np.float64)
    code = METHOD_CODES[method]
    if _NUMBA_IMPLS is not None:
        return _NUMBA_IMPLS[1](values, center, code, float(coef))
    return _row_summaries_numpy(values, center, code, float(coef))
