# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled shortest-augmenting-path kernel for the square assignment problem.

Works on a long double cost matrix and minimises. The caller negates weights
for maximisation. Must stay step-for-step identical to ``_solve_python`` in
``hungarian.py`` so both backends return the same permutation.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.math cimport INFINITY

cnp.import_array()

ctypedef long double ld


cdef Py_ssize_t _augment(Py_ssize_t n, const ld* cost, ld* u, ld* v,
                         Py_ssize_t* path, Py_ssize_t* row4col, ld* spc,
                         char* SR, char* SC, Py_ssize_t* remaining,
                         Py_ssize_t i, ld* p_min) noexcept nogil:
    cdef ld min_val = 0
    cdef ld lowest, r, inf = INFINITY
    cdef Py_ssize_t num_remaining = n, it, j, index, sink = -1
    cdef bint best_free
    for it in range(n):
        remaining[it] = it
        SR[it] = 0
        SC[it] = 0
        spc[it] = inf
    while sink == -1:
        index = -1
        lowest = inf
        best_free = 0
        SR[i] = 1
        for it in range(num_remaining):
            j = remaining[it]
            r = min_val + cost[i * n + j] - u[i] - v[j]
            if r < spc[j]:
                path[j] = i
                spc[j] = r
            if spc[j] < lowest or (spc[j] == lowest and not best_free
                                   and row4col[j] == -1):
                lowest = spc[j]
                index = it
                best_free = row4col[j] == -1
        min_val = lowest
        if index == -1:
            return -1
        j = remaining[index]
        if row4col[j] == -1:
            sink = j
        else:
            i = row4col[j]
        SC[j] = 1
        num_remaining -= 1
        remaining[index] = remaining[num_remaining]
    p_min[0] = min_val
    return sink


def solve_min(cnp.ndarray[cnp.longdouble_t, ndim=2, mode="c"] cost not None):
    """Return ``col4row`` minimising the total cost of a square matrix."""
    cdef Py_ssize_t n = cost.shape[0]
    cdef cnp.ndarray[cnp.intp_t, ndim=1] col4row = np.full(n, -1, dtype=np.intp)
    if n == 0:
        return col4row
    cdef const ld* c = <const ld*> cost.data
    cdef ld* u = <ld*> malloc(n * sizeof(ld))
    cdef ld* v = <ld*> malloc(n * sizeof(ld))
    cdef ld* spc = <ld*> malloc(n * sizeof(ld))
    cdef Py_ssize_t* path = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* row4col = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* c4r = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* remaining = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef char* SR = <char*> malloc(n)
    cdef char* SC = <char*> malloc(n)
    cdef Py_ssize_t cur, i, j, sink, tmp
    cdef ld min_val = 0
    cdef bint failed = 0
    try:
        with nogil:
            for i in range(n):
                u[i] = 0
                v[i] = 0
                path[i] = -1
                row4col[i] = -1
                c4r[i] = -1
            for cur in range(n):
                sink = _augment(n, c, u, v, path, row4col, spc, SR, SC,
                                remaining, cur, &min_val)
                if sink < 0:
                    failed = 1
                    break
                u[cur] += min_val
                for i in range(n):
                    if SR[i] and i != cur:
                        u[i] += min_val - spc[c4r[i]]
                for j in range(n):
                    if SC[j]:
                        v[j] -= min_val - spc[j]
                j = sink
                while True:
                    i = path[j]
                    row4col[j] = i
                    tmp = c4r[i]
                    c4r[i] = j
                    j = tmp
                    if i == cur:
                        break
        if failed:
            raise ValueError("cost matrix admits no finite assignment")
        for i in range(n):
            col4row[i] = c4r[i]
    finally:
        free(u); free(v); free(spc); free(path); free(row4col)
        free(c4r); free(remaining); free(SR); free(SC)
    return col4row
