# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled local-move kernel for the two-level map equation.

Exact twin of _kernel_py (the pure-Python fallback): same arithmetic in the
same order, so moves and results are bit-identical across backends. See the
fallback module for the codelength decomposition the deltas are based on.
"""

import numpy as np

from libc.math cimport log2

BACKEND = "compiled"


cdef inline double _plogp(double x) noexcept nogil:
    if x > 0.0:
        return x * log2(x)
    return 0.0


cdef inline double _move_terms(double sum_q, double qa, double pma,
                               double qb, double pmb, double pa,
                               double qa_new, double qb_new) noexcept nogil:
    cdef double sq_new = sum_q + (qa_new - qa) + (qb_new - qb)
    return (
        (_plogp(sq_new) - _plogp(sum_q))
        - 2.0 * (_plogp(qa_new) - _plogp(qa) + _plogp(qb_new) - _plogp(qb))
        + (_plogp(qa_new + pma - pa) - _plogp(qa + pma))
        + (_plogp(qb_new + pmb + pa) - _plogp(qb + pmb))
    )


cdef double _init_aggregates(Py_ssize_t n, double[::1] p,
                             long long[::1] out_ptr, long long[::1] out_idx,
                             double[::1] out_flow, long long[::1] modules,
                             double[::1] mod_q, double[::1] mod_p) noexcept nogil:
    cdef Py_ssize_t u, v, k
    cdef long long mu
    cdef double sum_q = 0.0
    for v in range(n):
        mod_p[modules[v]] += p[v]
    for u in range(n):
        mu = modules[u]
        for k in range(out_ptr[u], out_ptr[u + 1]):
            if modules[out_idx[k]] != mu:
                mod_q[mu] += out_flow[k]
    for u in range(n):
        sum_q += mod_q[u]
    return sum_q


def local_moves(double[::1] p,
                long long[::1] out_ptr, long long[::1] out_idx, double[::1] out_flow,
                long long[::1] in_ptr, long long[::1] in_idx, double[::1] in_flow,
                long long[::1] modules, long long[::1] order,
                long long max_passes, double eps):
    """Greedy passes over `order`, moving vertices to adjacent modules.

    Mutates `modules` in place and returns the total number of moves; the
    move rule matches the fallback implementation exactly.
    """
    cdef Py_ssize_t n = p.shape[0]
    mod_q_arr = np.zeros(n, dtype=np.float64)
    mod_p_arr = np.zeros(n, dtype=np.float64)
    flow_to_arr = np.zeros(n, dtype=np.float64)
    flow_from_arr = np.zeros(n, dtype=np.float64)
    last_seen_arr = np.full(n, -1, dtype=np.int64)
    cand_arr = np.zeros(n, dtype=np.int64)
    cdef double[::1] mod_q = mod_q_arr
    cdef double[::1] mod_p = mod_p_arr
    cdef double[::1] flow_to = flow_to_arr
    cdef double[::1] flow_from = flow_from_arr
    cdef long long[::1] last_seen = last_seen_arr
    cdef long long[::1] cand = cand_arr

    cdef double sum_q = _init_aggregates(n, p, out_ptr, out_idx, out_flow,
                                         modules, mod_q, mod_p)

    cdef long long stamp = 0
    cdef long long total_moves = 0
    cdef long long passes = 0
    cdef long long moves
    cdef Py_ssize_t t, k, i, j
    cdef long long alpha, a, m, b, best_b, key
    cdef Py_ssize_t ncand
    cdef double out_tot, f, pa, qa, pma, qa_new, qb, qb_new
    cdef double best_delta, best_qb_new, delta

    with nogil:
        while passes < max_passes:
            moves = 0
            for t in range(n):
                alpha = order[t]
                a = modules[alpha]
                stamp += 1
                cand[0] = a
                ncand = 1
                last_seen[a] = stamp
                flow_to[a] = 0.0
                flow_from[a] = 0.0
                out_tot = 0.0
                for k in range(out_ptr[alpha], out_ptr[alpha + 1]):
                    m = modules[out_idx[k]]
                    f = out_flow[k]
                    out_tot += f
                    if last_seen[m] != stamp:
                        last_seen[m] = stamp
                        flow_to[m] = 0.0
                        flow_from[m] = 0.0
                        cand[ncand] = m
                        ncand += 1
                    flow_to[m] += f
                for k in range(in_ptr[alpha], in_ptr[alpha + 1]):
                    m = modules[in_idx[k]]
                    f = in_flow[k]
                    if last_seen[m] != stamp:
                        last_seen[m] = stamp
                        flow_to[m] = 0.0
                        flow_from[m] = 0.0
                        cand[ncand] = m
                        ncand += 1
                    flow_from[m] += f
                if ncand == 1:
                    continue
                # insertion sort: candidates ascending for the tie rule
                for i in range(1, ncand):
                    key = cand[i]
                    j = i - 1
                    while j >= 0 and cand[j] > key:
                        cand[j + 1] = cand[j]
                        j -= 1
                    cand[j + 1] = key

                pa = p[alpha]
                qa = mod_q[a]
                pma = mod_p[a]
                qa_new = qa - (out_tot - flow_to[a]) + flow_from[a]

                best_delta = -eps
                best_b = -1
                best_qb_new = 0.0
                for i in range(ncand):
                    b = cand[i]
                    if b == a:
                        continue
                    qb = mod_q[b]
                    qb_new = qb + (out_tot - flow_to[b]) - flow_from[b]
                    delta = _move_terms(sum_q, qa, pma, qb, mod_p[b], pa,
                                        qa_new, qb_new)
                    if delta < best_delta:
                        best_delta = delta
                        best_b = b
                        best_qb_new = qb_new
                if best_b >= 0:
                    sum_q += (qa_new - qa) + (best_qb_new - mod_q[best_b])
                    mod_q[a] = qa_new
                    mod_p[a] = pma - pa
                    mod_q[best_b] = best_qb_new
                    mod_p[best_b] += pa
                    modules[alpha] = best_b
                    moves += 1
            if moves == 0:
                break
            total_moves += moves
            passes += 1
    return total_moves


def move_delta(double[::1] p,
               long long[::1] out_ptr, long long[::1] out_idx, double[::1] out_flow,
               long long[::1] in_ptr, long long[::1] in_idx, double[::1] in_flow,
               long long[::1] modules, long long alpha, long long target):
    """Codelength change of moving `alpha` to module `target`, in bits."""
    cdef Py_ssize_t n = p.shape[0]
    mod_q_arr = np.zeros(n, dtype=np.float64)
    mod_p_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] mod_q = mod_q_arr
    cdef double[::1] mod_p = mod_p_arr
    cdef double sum_q = _init_aggregates(n, p, out_ptr, out_idx, out_flow,
                                         modules, mod_q, mod_p)
    cdef long long a = modules[alpha]
    if target == a:
        return 0.0

    cdef double out_tot = 0.0, out_a = 0.0, out_b = 0.0, in_a = 0.0, in_b = 0.0
    cdef double f
    cdef long long m
    cdef Py_ssize_t k
    for k in range(out_ptr[alpha], out_ptr[alpha + 1]):
        m = modules[out_idx[k]]
        f = out_flow[k]
        out_tot += f
        if m == a:
            out_a += f
        elif m == target:
            out_b += f
    for k in range(in_ptr[alpha], in_ptr[alpha + 1]):
        m = modules[in_idx[k]]
        f = in_flow[k]
        if m == a:
            in_a += f
        elif m == target:
            in_b += f

    cdef double qa = mod_q[a]
    cdef double qb = mod_q[target]
    cdef double qa_new = qa - (out_tot - out_a) + in_a
    cdef double qb_new = qb + (out_tot - out_b) - in_b
    return _move_terms(sum_q, qa, mod_p[a], qb, mod_p[target], p[alpha],
                       qa_new, qb_new)
