"""Pure-Python local-move kernel for the two-level map equation.

Fallback twin of the compiled Cython kernel (_kernel.pyx). The two must stay
in lock step: same arithmetic, same iteration order, bit-identical moves, so
results do not depend on which backend is importable.

The codelength of a partition M, in bits, is

    L(M) = plogp(q) - 2*sum_m plogp(q_m) + sum_m plogp(q_m + p_m)
           - sum_a plogp(p_a)

with plogp(x) = x*log2(x), q_m the flow exiting module m, q = sum_m q_m and
p_m the visit mass inside m. Only the first three groups change when a vertex
moves, which is what move deltas evaluate.
"""

from math import log2

BACKEND = "python"


def _plogp(x):
    return x * log2(x) if x > 0.0 else 0.0


def _move_terms(sum_q, qa, pma, qb, pmb, pa, qa_new, qb_new):
    sq_new = sum_q + (qa_new - qa) + (qb_new - qb)
    return (
        (_plogp(sq_new) - _plogp(sum_q))
        - 2.0 * (_plogp(qa_new) - _plogp(qa) + _plogp(qb_new) - _plogp(qb))
        + (_plogp(qa_new + pma - pa) - _plogp(qa + pma))
        + (_plogp(qb_new + pmb + pa) - _plogp(qb + pmb))
    )


def _init_aggregates(n, p, out_ptr, out_idx, out_flow, modules, mod_q, mod_p):
    for v in range(n):
        mod_p[modules[v]] += p[v]
    for u in range(n):
        mu = modules[u]
        for k in range(out_ptr[u], out_ptr[u + 1]):
            if modules[out_idx[k]] != mu:
                mod_q[mu] += out_flow[k]
    sum_q = 0.0
    for m in range(n):
        sum_q += mod_q[m]
    return sum_q


def local_moves(p, out_ptr, out_idx, out_flow, in_ptr, in_idx, in_flow,
                modules, order, max_passes, eps):
    """Greedy passes over `order`, moving vertices to adjacent modules.

    A vertex moves to the neighboring module with the largest strictly
    positive codelength decrease (ties: smallest module id). Mutates
    `modules` in place; returns the total number of moves.
    """
    n = len(p)
    mod_q = [0.0] * n
    mod_p = [0.0] * n
    sum_q = _init_aggregates(n, p, out_ptr, out_idx, out_flow, modules, mod_q, mod_p)

    last_seen = [-1] * n
    flow_to = [0.0] * n
    flow_from = [0.0] * n
    stamp = 0

    total_moves = 0
    passes = 0
    while passes < max_passes:
        moves = 0
        for t in range(n):
            alpha = int(order[t])
            a = int(modules[alpha])
            stamp += 1
            cand = [a]
            last_seen[a] = stamp
            flow_to[a] = 0.0
            flow_from[a] = 0.0
            out_tot = 0.0
            for k in range(out_ptr[alpha], out_ptr[alpha + 1]):
                m = int(modules[out_idx[k]])
                f = out_flow[k]
                out_tot += f
                if last_seen[m] != stamp:
                    last_seen[m] = stamp
                    flow_to[m] = 0.0
                    flow_from[m] = 0.0
                    cand.append(m)
                flow_to[m] += f
            for k in range(in_ptr[alpha], in_ptr[alpha + 1]):
                m = int(modules[in_idx[k]])
                f = in_flow[k]
                if last_seen[m] != stamp:
                    last_seen[m] = stamp
                    flow_to[m] = 0.0
                    flow_from[m] = 0.0
                    cand.append(m)
                flow_from[m] += f
            if len(cand) == 1:
                continue
            cand.sort()

            pa = p[alpha]
            qa = mod_q[a]
            pma = mod_p[a]
            qa_new = qa - (out_tot - flow_to[a]) + flow_from[a]

            best_delta = -eps
            best_b = -1
            best_qb_new = 0.0
            for b in cand:
                if b == a:
                    continue
                qb = mod_q[b]
                qb_new = qb + (out_tot - flow_to[b]) - flow_from[b]
                delta = _move_terms(sum_q, qa, pma, qb, mod_p[b], pa, qa_new, qb_new)
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


def move_delta(p, out_ptr, out_idx, out_flow, in_ptr, in_idx, in_flow,
               modules, alpha, target):
    """Codelength change of moving `alpha` to module `target`, in bits.

    Exactly the quantity the optimizer compares; exposed so tests can check
    it against two full codelength evaluations.
    """
    n = len(p)
    mod_q = [0.0] * n
    mod_p = [0.0] * n
    sum_q = _init_aggregates(n, p, out_ptr, out_idx, out_flow, modules, mod_q, mod_p)
    alpha = int(alpha)
    target = int(target)
    a = int(modules[alpha])
    if target == a:
        return 0.0

    out_tot = 0.0
    out_a = 0.0
    out_b = 0.0
    for k in range(out_ptr[alpha], out_ptr[alpha + 1]):
        m = int(modules[out_idx[k]])
        f = out_flow[k]
        out_tot += f
        if m == a:
            out_a += f
        elif m == target:
            out_b += f
    in_a = 0.0
    in_b = 0.0
    for k in range(in_ptr[alpha], in_ptr[alpha + 1]):
        m = int(modules[in_idx[k]])
        f = in_flow[k]
        if m == a:
            in_a += f
        elif m == target:
            in_b += f

    qa = mod_q[a]
    qb = mod_q[target]
    qa_new = qa - (out_tot - out_a) + in_a
    qb_new = qb + (out_tot - out_b) - in_b
    return _move_terms(sum_q, qa, mod_p[a], qb, mod_p[target], p[alpha], qa_new, qb_new)
