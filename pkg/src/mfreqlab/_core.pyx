# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror :mod:`mfreqlab._pycore`."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, sqrt

cnp.import_array()


cdef inline double _dist(const double complex[:, :] s, Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t k
    cdef double acc = 0.0
    cdef double complex z
    for k in range(s.shape[1]):
        z = s[j, k] - s[i, k]
        acc += z.real * z.real + z.imag * z.imag
    return sqrt(acc)


cdef double _variation_power(const double complex[:, :] s, double r, double[::1] best) noexcept nogil:
    cdef Py_ssize_t T = s.shape[0]
    cdef Py_ssize_t i, j
    cdef double cand, top = 0.0, bj
    for j in range(T):
        bj = 0.0
        for i in range(j):
            cand = best[i] + pow(_dist(s, i, j), r)
            if cand > bj:
                bj = cand
        best[j] = bj
        if bj > top:
            top = bj
    return top


def variation_power(const double complex[:, :] samples, double r):
    """max over chains of sum ||increment||^r for samples of shape (T, D)."""
    cdef double[::1] best = np.zeros(max(samples.shape[0], 1))
    cdef double out
    with nogil:
        out = _variation_power(samples, r, best)
    return out


def variation_batch(const double complex[:, :, :] values, double r):
    """Rooted V^r for each row of an (X, T, D) array."""
    cdef Py_ssize_t X = values.shape[0]
    cdef Py_ssize_t x
    cdef double[::1] best = np.zeros(max(values.shape[1], 1))
    out_arr = np.empty(X)
    cdef double[::1] out = out_arr
    cdef double inv = 1.0 / r
    with nogil:
        for x in range(X):
            out[x] = pow(_variation_power(values[x], r, best), inv)
    return out_arr


def greedy_jump_count(const double complex[:, :] samples, double lam):
    cdef Py_ssize_t T = samples.shape[0]
    cdef Py_ssize_t anchor = 0, t
    cdef long count = 0
    with nogil:
        for t in range(1, T):
            if _dist(samples, anchor, t) >= lam:
                count += 1
                anchor = t
    return count


def max_jump_count(const double complex[:, :] samples, double lam):
    """Longest chain whose consecutive increments are all >= lam."""
    cdef Py_ssize_t T = samples.shape[0]
    cdef Py_ssize_t i, j
    cdef long top = 0, bj
    cdef long[::1] best = np.zeros(max(T, 1), dtype=np.int_)
    with nogil:
        for j in range(T):
            bj = 0
            for i in range(j):
                if best[i] + 1 > bj and _dist(samples, i, j) >= lam:
                    bj = best[i] + 1
            best[j] = bj
            if bj > top:
                top = bj
    return top


def gauss_residue_counts(long long a, const long long[::1] b, long long q, int d):
    """Histogram of (a*|r|^(2d) + b.r) mod q over r in [0, q)^n."""
    cdef Py_ssize_t n = b.shape[0]
    counts_arr = np.zeros(q, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef long long[::1] r = np.zeros(max(n, 1), dtype=np.int64)
    cdef long long norm2, lin, p, phase
    cdef Py_ssize_t i, k
    cdef int e
    cdef bint done = False
    with nogil:
        while not done:
            norm2 = 0
            lin = 0
            for i in range(n):
                norm2 = (norm2 + r[i] * r[i]) % q
                lin = (lin + b[i] * r[i]) % q
            p = 1 % q
            for e in range(d):
                p = (p * norm2) % q
            phase = ((a % q) * p + lin) % q
            if phase < 0:
                phase += q
            counts[phase] += 1
            # odometer over [0, q)^n
            k = 0
            while True:
                if k == n:
                    done = True
                    break
                r[k] += 1
                if r[k] < q:
                    break
                r[k] = 0
                k += 1
    return counts_arr
