# cython: boundscheck=False, wraparound=False, language_level=3
"""Compiled candidate generator for the match-path search.

Mirrors `_pathgen_py.extend` exactly (same outputs, same generation order);
this is the hot inner loop of pairwise matching.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef Py_ssize_t _upper_bound(const int* arr, Py_ssize_t n, int value) nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] <= value:
            lo = mid + 1
        else:
            hi = mid
    return lo


def extend(cnp.ndarray[cnp.int32_t, ndim=1] last_t,
           cnp.ndarray[cnp.int32_t, ndim=1] hits):
    """Pair every live state with every hit strictly beyond its last position."""

    cdef Py_ssize_t ns = last_t.shape[0]
    cdef Py_ssize_t nh = hits.shape[0]
    cdef const int* lt = <const int*> cnp.PyArray_DATA(last_t)
    cdef const int* hp = <const int*> cnp.PyArray_DATA(hits)
    cdef Py_ssize_t s, k, total = 0

    cdef cnp.ndarray[cnp.int64_t, ndim=1] starts = np.empty(ns, dtype=np.int64)
    cdef cnp.int64_t* sp = <cnp.int64_t*> cnp.PyArray_DATA(starts)
    with nogil:
        for s in range(ns):
            k = _upper_bound(hp, nh, lt[s])
            sp[s] = k
            total += nh - k

    cdef cnp.ndarray[cnp.int64_t, ndim=1] src = np.empty(total, dtype=np.int64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] ts = np.empty(total, dtype=np.int32)
    cdef cnp.int64_t* srcp = <cnp.int64_t*> cnp.PyArray_DATA(src)
    cdef int* tsp = <int*> cnp.PyArray_DATA(ts)
    cdef Py_ssize_t pos = 0, j
    with nogil:
        for s in range(ns):
            for j in range(sp[s], nh):
                srcp[pos] = s
                tsp[pos] = hp[j]
                pos += 1
    return src, ts
