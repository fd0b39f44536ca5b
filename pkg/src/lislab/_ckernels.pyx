# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: strict LIS and the Hammersley row sweep."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def lis_strict(values):
    cdef const double[::1] x = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[double, ndim=1] buf = np.empty(n + 1, dtype=np.float64)
    cdef double* tails = <double*> buf.data
    cdef Py_ssize_t size = 0, lo, hi, mid, i
    cdef double v
    for i in range(n):
        v = x[i]
        # leftmost tail >= v
        lo = 0
        hi = size
        while lo < hi:
            mid = (lo + hi) >> 1
            if tails[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        tails[lo] = v
        if lo == size:
            size += 1
    return size


cdef Py_ssize_t _step(const double* h, Py_ssize_t nh, const double* row, Py_ssize_t nr,
                      bint sink, double* out, int* created) nogil:
    cdef Py_ssize_t i = 0, j = 0, k = 0
    cdef bint z = sink
    while i < nh or j < nr:
        if j < nr and (i >= nh or row[j] <= h[i]):
            if not z:
                z = True
                out[k] = row[j]
                k += 1
            j += 1
        else:
            if z:
                z = False
            else:
                out[k] = h[i]
                k += 1
            i += 1
    created[0] = 1 if z else 0
    return k


def evolve_row(h, row, sink=False):
    cdef const double[::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef const double[::1] rv = np.ascontiguousarray(row, dtype=np.float64)
    cdef Py_ssize_t nh = hv.shape[0], nr = rv.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(nh + nr, dtype=np.float64)
    cdef int created = 0
    cdef double dummy = 0.0
    cdef const double* hp = &hv[0] if nh > 0 else &dummy
    cdef const double* rp = &rv[0] if nr > 0 else &dummy
    cdef Py_ssize_t k = _step(hp, nh, rp, nr, sink, <double*> out.data, &created)
    return out[:k].copy(), created


def sweep(row_ids, xs, sources, sink_rows, Py_ssize_t n_track=0):
    cdef const cnp.int64_t[::1] rows = np.ascontiguousarray(row_ids, dtype=np.int64)
    cdef const double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] src = np.ascontiguousarray(sources, dtype=np.float64)
    cdef const cnp.int64_t[::1] sinks = np.ascontiguousarray(sink_rows, dtype=np.int64)
    cdef Py_ssize_t na = rows.shape[0], nb = sinks.shape[0], ns = src.shape[0]
    cdef Py_ssize_t cap = ns + na + 1
    cdef cnp.ndarray[double, ndim=1] buf_a = np.empty(cap, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] buf_b = np.empty(cap, dtype=np.float64)
    track = np.zeros(n_track, dtype=np.int8)
    cdef cnp.int8_t[::1] tv = track
    cdef double* cur = <double*> buf_a.data
    cdef double* nxt = <double*> buf_b.data
    cdef double* tmp
    cdef double dummy = 0.0
    cdef const double* xp = &xv[0] if na > 0 else &dummy
    cdef Py_ssize_t nh = ns, a = 0, b = 0, start, i
    cdef cnp.int64_t r
    cdef bint sink
    cdef int created = 0
    cdef long sum_j = 0
    for i in range(ns):
        cur[i] = src[i]
    with nogil:
        while a < na or b < nb:
            if b >= nb or (a < na and rows[a] <= sinks[b]):
                r = rows[a]
            else:
                r = sinks[b]
            start = a
            while a < na and rows[a] == r:
                a += 1
            sink = b < nb and sinks[b] == r
            if sink:
                b += 1
            nh = _step(cur, nh, xp + start, a - start, sink, nxt, &created)
            tmp = cur
            cur = nxt
            nxt = tmp
            sum_j += created
            if created and r <= n_track:
                tv[r - 1] = 1
    out = np.empty(nh, dtype=np.float64)
    for i in range(nh):
        out[i] = cur[i]
    return out, int(sum_j), track
