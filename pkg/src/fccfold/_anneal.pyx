# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled single-flip Metropolis sweeps over a higher-order binary polynomial.

Mirrors ``_anneal_py.anneal`` exactly: same arithmetic order, same random
stream (supplied by the caller), so both backends return identical states.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def anneal(const long long[::1] term_offsets,
           const int[::1] term_vars,
           const double[::1] coeffs,
           const long long[::1] var_offsets,
           const int[::1] var_terms,
           signed char[::1] state,
           const int[:, ::1] order,
           const double[:, ::1] uniforms,
           const double[::1] betas,
           signed char[:, ::1] trace=None):
    cdef Py_ssize_t n = state.shape[0]
    cdef Py_ssize_t n_terms = coeffs.shape[0]
    cdef Py_ssize_t sweeps = betas.shape[0]
    cdef Py_ssize_t s, i, t, j, v
    cdef long long p
    cdef double beta, delta, cur = 0.0, best = 0.0
    cdef signed char old
    cdef cnp.ndarray[cnp.int32_t, ndim=1] zc_arr = np.zeros(n_terms, dtype=np.int32)
    cdef int[::1] zero_count = zc_arr
    cdef cnp.ndarray[cnp.int8_t, ndim=1] best_arr = np.asarray(state).copy()
    cdef signed char[::1] best_state = best_arr
    cdef bint record = trace is not None and trace.shape[0] == sweeps

    for t in range(n_terms):
        for p in range(term_offsets[t], term_offsets[t + 1]):
            if state[term_vars[p]] == 0:
                zero_count[t] += 1

    with nogil:
        for s in range(sweeps):
            beta = betas[s]
            for i in range(n):
                v = order[s, i]
                old = state[v]
                delta = 0.0
                if old == 0:
                    for p in range(var_offsets[v], var_offsets[v + 1]):
                        t = var_terms[p]
                        if zero_count[t] == 1:
                            delta += coeffs[t]
                else:
                    for p in range(var_offsets[v], var_offsets[v + 1]):
                        t = var_terms[p]
                        if zero_count[t] == 0:
                            delta -= coeffs[t]
                if delta <= 0.0 or uniforms[s, i] < exp(-beta * delta):
                    state[v] = 1 - old
                    if old == 0:
                        for p in range(var_offsets[v], var_offsets[v + 1]):
                            zero_count[var_terms[p]] -= 1
                    else:
                        for p in range(var_offsets[v], var_offsets[v + 1]):
                            zero_count[var_terms[p]] += 1
                    cur += delta
                    if cur < best:
                        best = cur
                        for j in range(n):
                            best_state[j] = state[j]
            if record:
                for j in range(n):
                    trace[s, j] = state[j]
    return best_arr, best
