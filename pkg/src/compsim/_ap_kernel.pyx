# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled message-passing kernels for affinity propagation.

Scalar-loop twins of compsim._ap_numpy; selected at import by
compsim.affinity when the extension has been built.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def responsibility_update(double[:, ::1] S, double[:, ::1] R_old,
                          double[:, ::1] A, double damping):
    cdef Py_ssize_t n = S.shape[0]
    cdef Py_ssize_t m, j
    cdef double best, second, v, raw
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] res = out
    cdef Py_ssize_t best_j

    if n == 1:
        res[0, 0] = damping * R_old[0, 0] + (1.0 - damping) * S[0, 0]
        return out

    for m in range(n):
        best = -np.inf
        second = -np.inf
        best_j = 0
        for j in range(n):
            v = A[m, j] + S[m, j]
            if v > best:
                second = best
                best = v
                best_j = j
            elif v > second:
                second = v
        for j in range(n):
            if j == best_j:
                raw = S[m, j] - second
            else:
                raw = S[m, j] - best
            res[m, j] = damping * R_old[m, j] + (1.0 - damping) * raw
    return out


def availability_update(double[:, ::1] R, double[:, ::1] A_old, double damping):
    cdef Py_ssize_t n = R.shape[0]
    cdef Py_ssize_t m, j
    cdef double total, contrib, raw
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] res = out
    col_totals = np.empty(n, dtype=np.float64)
    cdef double[::1] totals = col_totals

    # column totals of max(0, R(m, j)) with the diagonal entering as R(j, j)
    for j in range(n):
        total = R[j, j]
        for m in range(n):
            if m != j and R[m, j] > 0.0:
                total += R[m, j]
        totals[j] = total

    for m in range(n):
        for j in range(n):
            if m == j:
                raw = totals[j] - R[j, j]
            else:
                contrib = R[m, j] if R[m, j] > 0.0 else 0.0
                raw = totals[j] - contrib
                if raw > 0.0:
                    raw = 0.0
            res[m, j] = damping * A_old[m, j] + (1.0 - damping) * raw
    return out
