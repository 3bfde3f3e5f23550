# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for Lloyd k-means and the argmin lumping iteration.

Semantics and floating-point evaluation order match ``_kernels_py`` exactly.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef double MASS_TOL = 1e-15


cdef void _assign(const double[:, ::1] x, const double[:, ::1] c,
                  long long[::1] out, double[::1] mind) noexcept nogil:
    cdef Py_ssize_t n = x.shape[0], k = c.shape[0], d = x.shape[1]
    cdef Py_ssize_t i, j, t, best
    cdef double acc, diff, bestd
    for i in range(n):
        best = 0
        bestd = 0.0
        for j in range(k):
            acc = 0.0
            for t in range(d):
                diff = x[i, t] - c[j, t]
                acc = acc + diff * diff
            if j == 0 or acc < bestd:
                bestd = acc
                best = j
        out[i] = best
        mind[i] = bestd


cdef void _reseed(long long[::1] labels, long long[::1] counts, double[::1] mind,
                  Py_ssize_t k, long long[::1] moved_to) noexcept nogil:
    # moved_to[j] = index of the point moved into empty cluster j, or -1
    cdef Py_ssize_t n = labels.shape[0], i, j, far
    cdef double best, val
    for j in range(k):
        moved_to[j] = -1
        if counts[j] == 0:
            far = 0
            best = 0.0
            for i in range(n):
                val = mind[i] if counts[labels[i]] > 1 else -1.0
                if i == 0 or val > best:
                    best = val
                    far = i
            counts[labels[far]] -= 1
            labels[far] = j
            counts[j] = 1
            mind[far] = 0.0
            moved_to[j] = far


def lloyd(x, centers, Py_ssize_t max_iter):
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    c_arr = np.array(centers, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] cv = c_arr
    cdef Py_ssize_t n = xv.shape[0], d = xv.shape[1], k = cv.shape[0]
    labels_arr = np.full(n, -1, dtype=np.int64)
    new_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] labels = labels_arr
    cdef long long[::1] new = new_arr
    cdef double[::1] mind = np.empty(n)
    cdef long long[::1] counts = np.empty(k, dtype=np.int64)
    cdef long long[::1] moved = np.empty(k, dtype=np.int64)
    cdef double[::1] trace = np.empty(max(max_iter, 1))
    cdef Py_ssize_t it, i, j, t, n_trace = 0
    cdef bint converged = False, same
    cdef double acc
    with nogil:
        for it in range(max_iter):
            _assign(xv, cv, new, mind)
            for j in range(k):
                counts[j] = 0
            for i in range(n):
                counts[new[i]] += 1
            _reseed(new, counts, mind, k, moved)
            for j in range(k):
                if moved[j] >= 0:
                    for t in range(d):
                        cv[j, t] = xv[moved[j], t]
            acc = 0.0
            for i in range(n):
                acc = acc + mind[i]
            trace[n_trace] = acc
            n_trace += 1
            same = True
            for i in range(n):
                if new[i] != labels[i]:
                    same = False
                    break
            if same:
                converged = True
                break
            for i in range(n):
                labels[i] = new[i]
            for j in range(k):
                for t in range(d):
                    cv[j, t] = 0.0
            for t in range(d):
                for i in range(n):
                    cv[labels[i], t] = cv[labels[i], t] + xv[i, t]
            for j in range(k):
                for t in range(d):
                    cv[j, t] = cv[j, t] / counts[j]
    return labels_arr, c_arr, np.asarray(trace)[:n_trace].copy(), bool(converged)


def inertia(x, centers, labels):
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[:, ::1] cv = np.ascontiguousarray(centers, dtype=np.float64)
    cdef const long long[::1] lv = np.ascontiguousarray(labels, dtype=np.int64)
    cdef Py_ssize_t i, t
    cdef double acc = 0.0, row, diff
    for i in range(xv.shape[0]):
        row = 0.0
        for t in range(xv.shape[1]):
            diff = xv[i, t] - cv[lv[i], t]
            row = row + diff * diff
        acc = acc + row
    return acc


cdef void _block_sums(const double[:, ::1] p, const long long[::1] labels,
                      double[:, ::1] a) noexcept nogil:
    cdef Py_ssize_t n = p.shape[0], k = a.shape[1], i, j
    for i in range(n):
        for j in range(k):
            a[i, j] = 0.0
        for j in range(p.shape[1]):
            a[i, labels[j]] = a[i, labels[j]] + p[i, j]


cdef void _reduced_rows(const double[:, ::1] a, const double[::1] v, const long long[::1] labels,
                        double[:, ::1] num, double[:, ::1] plain, double[::1] mass,
                        long long[::1] counts, double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], k = num.shape[0], i, l, t
    for l in range(k):
        mass[l] = 0.0
        counts[l] = 0
        for t in range(k):
            num[l, t] = 0.0
            plain[l, t] = 0.0
    for i in range(n):
        l = labels[i]
        for t in range(k):
            num[l, t] = num[l, t] + v[i] * a[i, t]
    for i in range(n):
        mass[labels[i]] = mass[labels[i]] + v[i]
    for i in range(n):
        l = labels[i]
        counts[l] += 1
        for t in range(k):
            plain[l, t] = plain[l, t] + a[i, t]
    for l in range(k):
        for t in range(k):
            if mass[l] < MASS_TOL:
                out[l, t] = plain[l, t] / counts[l]
            else:
                out[l, t] = num[l, t] / mass[l]


def block_sums(p, labels, Py_ssize_t k):
    cdef const double[:, ::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    out = np.empty((pv.shape[0], k))
    _block_sums(pv, np.ascontiguousarray(labels, dtype=np.int64), out)
    return out


def iterate_lumping(p, v, labels, Py_ssize_t k, Py_ssize_t max_iter):
    cdef const double[:, ::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef const double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    labels_arr = np.array(labels, dtype=np.int64, copy=True)
    cdef long long[::1] lab = labels_arr
    cdef Py_ssize_t n = pv.shape[0], it, i, l
    cdef long long[::1] new = np.empty(n, dtype=np.int64)
    cdef double[:, ::1] a = np.empty((n, k))
    cdef double[:, ::1] red = np.empty((k, k))
    cdef double[:, ::1] num = np.empty((k, k))
    cdef double[:, ::1] plain = np.empty((k, k))
    cdef double[::1] mass = np.empty(k)
    cdef long long[::1] counts = np.empty(k, dtype=np.int64)
    cdef long long[::1] moved = np.empty(k, dtype=np.int64)
    cdef double[::1] mind = np.empty(n)
    cdef bint same
    with nogil:
        for it in range(1, max_iter + 1):
            _block_sums(pv, lab, a)
            _reduced_rows(a, vv, lab, num, plain, mass, counts, red)
            _assign(a, red, new, mind)
            for l in range(k):
                counts[l] = 0
            for i in range(n):
                counts[new[i]] += 1
            _reseed(new, counts, mind, k, moved)
            same = True
            for i in range(n):
                if new[i] != lab[i]:
                    same = False
                    break
            if same:
                with gil:
                    return labels_arr, it, True
            for i in range(n):
                lab[i] = new[i]
    return labels_arr, max_iter, False
