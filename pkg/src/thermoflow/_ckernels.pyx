# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


cdef inline double _interp(double x, const double[:] xs, const double[:] ys, Py_ssize_t *pos) noexcept nogil:
    # advance a monotone cursor; queries arrive in increasing x
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t i = pos[0]
    while i < n - 2 and xs[i + 1] <= x:
        i += 1
    pos[0] = i
    if x <= xs[0]:
        return ys[0]
    if x >= xs[n - 1]:
        return ys[n - 1]
    cdef double span = xs[i + 1] - xs[i]
    if span <= 0.0:
        return ys[i + 1]
    return ys[i] + (ys[i + 1] - ys[i]) * (x - xs[i]) / span


def curve_gap(const double[:] xu, const double[:] yu, const double[:] xl, const double[:] yl):
    cdef Py_ssize_t nu = xu.shape[0], nl = xl.shape[0]
    cdef Py_ssize_t iu = 0, il = 0, pu = 0, pl = 0
    cdef double x, diff, best = -INFINITY, best_x = 0.0
    with nogil:
        while iu < nu or il < nl:
            if il >= nl or (iu < nu and xu[iu] <= xl[il]):
                x = xu[iu]
                iu += 1
            else:
                x = xl[il]
                il += 1
            diff = _interp(x, xl, yl, &pl) - _interp(x, xu, yu, &pu)
            if diff > best:
                best = diff
                best_x = x
    return best, best_x


def flattest_sorted(p_in, w_in, mult_in, double eps):
    cdef const double[::1] p = np.ascontiguousarray(p_in, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(w_in, dtype=np.float64)
    cdef const double[::1] mult = np.ascontiguousarray(mult_in, dtype=np.float64)
    cdef Py_ssize_t k = p.shape[0], j
    out_arr = np.array(p, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] head_mass = np.empty(k)
    cdef double[::1] head_weight = np.empty(k)
    cdef double[::1] tail_mass = np.empty(k)
    cdef double[::1] tail_weight = np.empty(k)
    cdef double acc_m = 0.0, acc_w = 0.0, level
    cdef int m = -1, n = -1

    for j in range(k):
        acc_m += mult[j] * p[j]
        acc_w += mult[j] * w[j]
        head_mass[j] = acc_m
        head_weight[j] = acc_w
    acc_m = 0.0
    acc_w = 0.0
    for j in range(k - 1, -1, -1):
        acc_m += mult[j] * p[j]
        acc_w += mult[j] * w[j]
        tail_mass[j] = acc_m
        tail_weight[j] = acc_w

    for j in range(k - 1):
        if head_mass[j] - (p[j + 1] / w[j + 1]) * head_weight[j] >= eps:
            m = <int>j + 1
            break
    for j in range(k - 1, 0, -1):
        if (p[j - 1] / w[j - 1]) * tail_weight[j] - tail_mass[j] >= eps:
            n = <int>j + 1
            break

    if m > 0:
        level = (head_mass[m - 1] - eps) / head_weight[m - 1]
        for j in range(m):
            out[j] = w[j] * level
    if n > 0:
        level = (tail_mass[n - 1] + eps) / tail_weight[n - 1]
        for j in range(n - 1, k):
            out[j] = w[j] * level
    return out_arr, m, n


def compositions(Py_ssize_t n, Py_ssize_t d):
    from math import comb
    cdef Py_ssize_t count = comb(n + d - 1, d - 1)
    out_arr = np.zeros((count, d), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef cnp.int64_t[::1] c = np.zeros(d, dtype=np.int64)
    cdef Py_ssize_t row = 0, i, j
    cdef cnp.int64_t tail
    c[0] = n
    with nogil:
        while True:
            for i in range(d):
                out[row, i] = c[i]
            row += 1
            j = d - 2
            while j >= 0 and c[j] == 0:
                j -= 1
            if j < 0:
                break
            tail = c[d - 1]
            c[d - 1] = 0
            c[j] -= 1
            c[j + 1] = tail + 1
    return out_arr
