# cython: language_level=3
"""Compiled kernel implementations; semantics match mdtk._kernels._py exactly."""
from libc.stdlib cimport free, malloc
from libc.string cimport memset

import numpy as np

BACKEND = "cython"

NO_BOUND = 2**62

ctypedef long long i64


cdef inline i64 _imax(i64 a, i64 b) nogil:
    return a if a > b else b


cdef inline i64 _imin(i64 a, i64 b) nogil:
    return a if a < b else b


cdef inline i64 _icount(i64 lo, i64 hi, i64 a, i64 b) nogil:
    cdef i64 lo2 = _imax(lo, a)
    cdef i64 hi2 = _imin(hi, b)
    return hi2 - lo2 + 1 if hi2 >= lo2 else 0


def has_same_key_overlap(key, onset, offset):
    order = np.lexsort((onset, key))
    cdef i64[::1] k = np.ascontiguousarray(key[order], dtype=np.int64)
    cdef i64[::1] on = np.ascontiguousarray(onset[order], dtype=np.int64)
    cdef i64[::1] off = np.ascontiguousarray(offset[order], dtype=np.int64)
    cdef Py_ssize_t i, n = k.shape[0]
    cdef i64 max_off = 0
    for i in range(n):
        if i > 0 and k[i] == k[i - 1]:
            if on[i] < max_off:
                return True
            max_off = _imax(max_off, off[i])
        else:
            max_off = off[i]
    return False


def pitch_shift_counts(pitch, onset, offset, long long min_pitch, long long max_pitch):
    cdef i64[::1] p = np.ascontiguousarray(pitch, dtype=np.int64)
    cdef i64[::1] on = np.ascontiguousarray(onset, dtype=np.int64)
    cdef i64[::1] off = np.ascontiguousarray(offset, dtype=np.int64)
    cdef Py_ssize_t i, j, n = p.shape[0]
    out = np.zeros(n, dtype=np.int64)
    cdef i64[::1] counts = out
    cdef i64 width = max_pitch - min_pitch + 1
    cdef i64 taken, own
    cdef char blocked[128]
    for i in range(n):
        memset(blocked, 0, 128)
        for j in range(n):
            if j != i and on[j] < off[i] and off[j] > on[i]:
                blocked[p[j]] = 1
        taken = 0
        for j in range(min_pitch, max_pitch + 1):
            if blocked[j]:
                taken += 1
        own = 1 if (min_pitch <= p[i] <= max_pitch and not blocked[p[i]]) else 0
        counts[i] = width - taken - own
    return out


def onset_shift_counts(pitch, onset, offset, long long min_shift, long long max_shift,
                       long long min_dur, long long max_dur):
    cdef i64[::1] p = np.ascontiguousarray(pitch, dtype=np.int64)
    cdef i64[::1] on = np.ascontiguousarray(onset, dtype=np.int64)
    cdef i64[::1] off = np.ascontiguousarray(offset, dtype=np.int64)
    cdef Py_ssize_t i, j, n = p.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef i64[::1] counts = out
    cdef i64 o, f, lo, hi
    for i in range(n):
        o = on[i]
        f = off[i]
        lo = _imax(0, f - max_dur)
        for j in range(n):
            if j != i and p[j] == p[i] and on[j] < f:
                lo = _imax(lo, off[j])
        hi = f - min_dur
        counts[i] = _icount(lo, hi, o - max_shift, o - min_shift) + \
            _icount(lo, hi, o + min_shift, o + max_shift)
    return out


def offset_shift_counts(pitch, onset, offset, long long excerpt_end,
                        long long min_shift, long long max_shift,
                        long long min_dur, long long max_dur):
    cdef i64[::1] p = np.ascontiguousarray(pitch, dtype=np.int64)
    cdef i64[::1] on = np.ascontiguousarray(onset, dtype=np.int64)
    cdef i64[::1] off = np.ascontiguousarray(offset, dtype=np.int64)
    cdef Py_ssize_t i, j, n = p.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef i64[::1] counts = out
    cdef i64 o, f, lo, hi
    for i in range(n):
        o = on[i]
        f = off[i]
        hi = _imin(excerpt_end, o + max_dur)
        for j in range(n):
            if j != i and p[j] == p[i] and off[j] > o:
                hi = _imin(hi, on[j])
        lo = o + min_dur
        counts[i] = _icount(lo, hi, f - max_shift, f - min_shift) + \
            _icount(lo, hi, f + min_shift, f + max_shift)
    return out


cdef i64 _window_minus_blocked(i64 wlo, i64 whi, i64[::1] p, i64[::1] on, i64[::1] off,
                               Py_ssize_t i, i64 d) nogil:
    """Integers in [wlo, whi] outside every same-pitch blocked interval."""
    cdef i64 total, cover, cur_lo, cur_hi, blo, bhi
    cdef Py_ssize_t j, n = p.shape[0]
    cdef bint have = False
    if whi < wlo:
        return 0
    total = whi - wlo + 1
    cover = 0
    cur_lo = 0
    cur_hi = 0
    for j in range(n):
        if j == i or p[j] != p[i]:
            continue
        blo = on[j] - d + 1
        bhi = off[j] - 1
        if bhi < blo:
            continue
        if not have:
            cur_lo = blo
            cur_hi = bhi
            have = True
        elif blo <= cur_hi + 1:
            cur_hi = _imax(cur_hi, bhi)
        else:
            cover += _icount(cur_lo, cur_hi, wlo, whi)
            cur_lo = blo
            cur_hi = bhi
    if have:
        cover += _icount(cur_lo, cur_hi, wlo, whi)
    return total - cover


def time_shift_counts(pitch, onset, offset, long long excerpt_end,
                      long long min_shift, long long max_shift):
    cdef i64[::1] p = np.ascontiguousarray(pitch, dtype=np.int64)
    cdef i64[::1] on = np.ascontiguousarray(onset, dtype=np.int64)
    cdef i64[::1] off = np.ascontiguousarray(offset, dtype=np.int64)
    cdef Py_ssize_t i, n = p.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef i64[::1] counts = out
    cdef i64 o, d, base_lo, base_hi
    for i in range(n):
        o = on[i]
        d = off[i] - o
        base_lo = 0
        base_hi = excerpt_end - d
        counts[i] = _window_minus_blocked(
            _imax(o - max_shift, base_lo), _imin(o - min_shift, base_hi),
            p, on, off, i, d
        ) + _window_minus_blocked(
            _imax(o + min_shift, base_lo), _imin(o + max_shift, base_hi),
            p, on, off, i, d
        )
    return out


def rasterize(pitch, onset_frame, offset_frame, long long n_frames):
    cdef i64[::1] p = np.ascontiguousarray(pitch, dtype=np.int64)
    cdef i64[::1] a = np.ascontiguousarray(onset_frame, dtype=np.int64)
    cdef i64[::1] b = np.ascontiguousarray(offset_frame, dtype=np.int64)
    presence_arr = np.zeros((n_frames, 128), dtype=np.uint8)
    onsets_arr = np.zeros((n_frames, 128), dtype=np.uint8)
    cdef unsigned char[:, ::1] presence = presence_arr
    cdef unsigned char[:, ::1] onsets = onsets_arr
    cdef Py_ssize_t i, n = p.shape[0]
    cdef i64 f, stop
    for i in range(n):
        if a[i] >= n_frames:
            continue
        stop = _imin(b[i], n_frames)
        for f in range(a[i], stop):
            presence[f, p[i]] = 1
        onsets[a[i], p[i]] = 1
    return presence_arr, onsets_arr


cdef bint _try_augment(Py_ssize_t a, i64* adj_start, i64* adj_flat, i64* adj_len,
                       i64* match_b, char* visited) nogil:
    cdef Py_ssize_t k
    cdef i64 b
    for k in range(adj_len[a]):
        b = adj_flat[adj_start[a] + k]
        if visited[b]:
            continue
        visited[b] = 1
        if match_b[b] == -1 or _try_augment(match_b[b], adj_start, adj_flat,
                                            adj_len, match_b, visited):
            match_b[b] = a
            return True
    return False


def onset_match_count(pitch_a, onset_a, pitch_b, onset_b, long long tol):
    cdef i64[::1] pa = np.ascontiguousarray(pitch_a, dtype=np.int64)
    cdef i64[::1] oa = np.ascontiguousarray(onset_a, dtype=np.int64)
    cdef i64[::1] pb = np.ascontiguousarray(pitch_b, dtype=np.int64)
    order = np.argsort(np.asarray(onset_b, dtype=np.int64), kind="stable")
    cdef i64[::1] order_b = np.ascontiguousarray(order, dtype=np.int64)
    ob_sorted_arr = np.asarray(onset_b, dtype=np.int64)[order]
    cdef i64[::1] ob_sorted = np.ascontiguousarray(ob_sorted_arr, dtype=np.int64)
    cdef Py_ssize_t na = pa.shape[0], nb = pb.shape[0]
    cdef Py_ssize_t i, j, lo, hi, mid, count = 0
    cdef i64 n_edges = 0

    cdef i64* adj_start = <i64*> malloc(sizeof(i64) * (na + 1))
    cdef i64* adj_len = <i64*> malloc(sizeof(i64) * max(na, 1))
    cdef i64* match_b = <i64*> malloc(sizeof(i64) * max(nb, 1))
    cdef char* visited = <char*> malloc(max(nb, 1))
    cdef i64* adj_flat = NULL
    try:
        # Pass 1: count edges per left node (window by onset, filter pitch).
        for i in range(na):
            lo = _bisect_left(ob_sorted, oa[i] - tol, nb)
            hi = _bisect_right(ob_sorted, oa[i] + tol, nb)
            adj_len[i] = 0
            for j in range(lo, hi):
                if pb[order_b[j]] == pa[i]:
                    adj_len[i] += 1
            n_edges += adj_len[i]
        adj_start[0] = 0
        for i in range(na):
            adj_start[i + 1] = adj_start[i] + adj_len[i]
        adj_flat = <i64*> malloc(sizeof(i64) * max(n_edges, 1))
        for i in range(na):
            lo = _bisect_left(ob_sorted, oa[i] - tol, nb)
            hi = _bisect_right(ob_sorted, oa[i] + tol, nb)
            mid = adj_start[i]
            for j in range(lo, hi):
                if pb[order_b[j]] == pa[i]:
                    adj_flat[mid] = order_b[j]
                    mid += 1
        for j in range(nb):
            match_b[j] = -1
        for i in range(na):
            memset(visited, 0, max(nb, 1))
            if _try_augment(i, adj_start, adj_flat, adj_len, match_b, visited):
                count += 1
        return count
    finally:
        free(adj_start)
        free(adj_len)
        free(match_b)
        free(visited)
        if adj_flat != NULL:
            free(adj_flat)


cdef Py_ssize_t _bisect_left(i64[::1] arr, i64 value, Py_ssize_t n) nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if arr[mid] < value:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef Py_ssize_t _bisect_right(i64[::1] arr, i64 value, Py_ssize_t n) nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if arr[mid] <= value:
            lo = mid + 1
        else:
            hi = mid
    return lo
