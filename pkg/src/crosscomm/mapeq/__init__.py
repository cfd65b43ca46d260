"""Two-level map equation: codelength evaluation and greedy detection.

The detector is a deterministic Louvain-style optimizer over random-walk
flow. Undirected graphs use the exact stationary distribution (strength over
total strength) and edge flows; directed supra walks use PageRank visit
rates and arc flows p(u) * P(u -> v).

The hot local-move loop lives in a compiled Cython kernel with a pure-Python
twin; whichever is importable is selected here (CROSSCOMM_KERNEL=python|compiled
forces the choice).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..assignment import CommunityAssignment, canonical_membership
from ..flow import StationaryDistribution, community_pagerank_order, pagerank, strength_distribution
from ..graph import Graph
from ..multilayer import FlowGraph

_choice = os.environ.get("CROSSCOMM_KERNEL", "")
if _choice == "python":
    from . import _kernel_py as _kernel
elif _choice == "compiled":
    from . import _kernel  # noqa: F401  (raises if the extension was not built)
else:
    try:
        from . import _kernel  # type: ignore[no-redef]
    except ImportError:
        from . import _kernel_py as _kernel  # type: ignore[no-redef]

KERNEL_BACKEND = _kernel.BACKEND

DEFAULT_DAMPING = 0.85
MOVE_EPS = 1e-12
_MAX_PASSES = 1_000_000


@dataclass
class Codelength:
    """Per-step description length of the partition, in bits."""

    bits: float
    index_term: float
    module_terms: float


class _FlowArrays:
    """Flattened flow network: visit rates plus arc flows in out- and in-CSR."""

    def __init__(self, n, p, src, dst, flow):
        self.n = n
        self.p = np.ascontiguousarray(p, dtype=np.float64)
        # merge duplicate arcs; ascending (src, dst) doubles as the out-CSR order
        key = src * n + dst
        uniq, inv = np.unique(key, return_inverse=True)
        flow = np.bincount(inv.ravel(), weights=flow, minlength=len(uniq))
        src = (uniq // n).astype(np.int64)
        dst = (uniq % n).astype(np.int64)
        self.src = src
        self.dst = dst
        self.flow = np.ascontiguousarray(flow, dtype=np.float64)
        self.out_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=self.out_ptr[1:])
        self.out_idx = dst.copy()
        self.out_flow = self.flow.copy()
        order_in = np.lexsort((src, dst))
        self.in_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(dst, minlength=n), out=self.in_ptr[1:])
        self.in_idx = np.ascontiguousarray(src[order_in])
        self.in_flow = np.ascontiguousarray(self.flow[order_in])


def _as_vector(p, n):
    if p is None:
        return None
    vec = p.p if isinstance(p, StationaryDistribution) else np.asarray(p, dtype=np.float64)
    if len(vec) != n:
        raise ValueError(f"distribution covers {len(vec)} vertices, network has {n}")
    return vec


def flow_arrays(flow, p=None) -> _FlowArrays:
    """Visit rates and arc flows for a Graph or FlowGraph.

    Defaults: strength distribution for undirected graphs, PageRank with
    damping 0.85 for supra walks. Arc flow is p(u) * P(u -> v); self-arcs
    carry no module-exit information and are dropped.
    """
    if isinstance(flow, Graph):
        n = flow.n
        if n == 0:
            raise ValueError("empty graph")
        vec = _as_vector(p, n)
        if vec is None:
            vec = strength_distribution(flow)
        P, _ = flow.transition()
    elif isinstance(flow, FlowGraph):
        n = flow.m
        vec = _as_vector(p, n)
        if vec is None:
            vec = pagerank(flow, damping=DEFAULT_DAMPING).p
        P = flow.trans
    else:
        raise TypeError(f"expected Graph or FlowGraph, got {type(flow)!r}")
    coo = P.tocoo()
    keep = coo.row != coo.col
    src = coo.row[keep].astype(np.int64)
    dst = coo.col[keep].astype(np.int64)
    arcflow = vec[src] * coo.data[keep]
    return _FlowArrays(n, vec, src, dst, arcflow)


def _elements_of(flow):
    if isinstance(flow, Graph):
        return tuple(flow.labels)
    return tuple(flow.identity)


def _codelength_arrays(arr: _FlowArrays, membership: np.ndarray) -> Codelength:
    """Evaluate the two-level map equation from its entropy definition."""
    k = int(membership.max()) + 1
    mod_p = np.bincount(membership, weights=arr.p, minlength=k)
    cross = membership[arr.src] != membership[arr.dst]
    mod_q = np.bincount(membership[arr.src][cross], weights=arr.flow[cross], minlength=k)

    q = float(mod_q.sum())
    if q > 0.0:
        ratios = mod_q[mod_q > 0] / q
        index_term = q * float(-(ratios * np.log2(ratios)).sum())
    else:
        index_term = 0.0

    p_circ = mod_q + mod_p  # module usage: exit plus member visits
    module_terms = 0.0
    nzq = mod_q > 0
    module_terms += float(-(mod_q[nzq] * np.log2(mod_q[nzq] / p_circ[nzq])).sum())
    pc_of = p_circ[membership]
    nzv = arr.p > 0
    module_terms += float(-(arr.p[nzv] * np.log2(arr.p[nzv] / pc_of[nzv])).sum())
    return Codelength(bits=index_term + module_terms,
                      index_term=index_term, module_terms=module_terms)


def codelength(flow, assign: CommunityAssignment, p=None) -> Codelength:
    """Map-equation codelength of `assign` on a Graph or FlowGraph."""
    arr = flow_arrays(flow, p)
    membership = np.asarray(assign.membership, dtype=np.int64)
    if len(membership) != arr.n:
        raise ValueError(
            f"assignment covers {len(membership)} vertices, network has {arr.n}"
        )
    if assign.elements != _elements_of(flow):
        raise ValueError("assignment elements do not match the network's vertices")
    return _codelength_arrays(arr, membership)


def move_delta(flow, membership, vertex: int, target: int, p=None) -> float:
    """The optimizer's incremental codelength change for one vertex move."""
    arr = flow_arrays(flow, p)
    modules = np.ascontiguousarray(membership, dtype=np.int64)
    return float(_kernel.move_delta(
        arr.p, arr.out_ptr, arr.out_idx, arr.out_flow,
        arr.in_ptr, arr.in_idx, arr.in_flow, modules,
        int(vertex), int(target),
    ))


def _aggregate(arr: _FlowArrays, dense: np.ndarray, k: int) -> _FlowArrays:
    p_new = np.bincount(dense, weights=arr.p, minlength=k)
    src = dense[arr.src]
    dst = dense[arr.dst]
    keep = src != dst
    return _FlowArrays(k, p_new, src[keep].astype(np.int64),
                       dst[keep].astype(np.int64), arr.flow[keep])


def _run_kernel(arr: _FlowArrays, modules: np.ndarray, order: np.ndarray,
                max_passes: int) -> int:
    return _kernel.local_moves(
        arr.p, arr.out_ptr, arr.out_idx, arr.out_flow,
        arr.in_ptr, arr.in_idx, arr.in_flow,
        modules, order, max_passes, MOVE_EPS,
    )


def _run_trial(arr: _FlowArrays, rng: np.random.Generator) -> np.ndarray:
    """One seeded greedy trial: move passes, aggregate, recurse, fine-tune."""
    membership = np.arange(arr.n, dtype=np.int64)
    level = arr
    while True:
        modules = np.arange(level.n, dtype=np.int64)
        order = rng.permutation(level.n).astype(np.int64)
        moves = _run_kernel(level, modules, order, _MAX_PASSES)
        if moves == 0:
            break
        uniq, dense = np.unique(modules, return_inverse=True)
        dense = dense.reshape(-1).astype(np.int64)
        membership = dense[membership]
        if len(uniq) == level.n:
            break
        level = _aggregate(level, dense, len(uniq))
    modules = membership.copy()
    order = rng.permutation(arr.n).astype(np.int64)
    _run_kernel(arr, modules, order, 1)
    return modules


def detect(flow, p=None, trials: int = 10, rng_seed: int = 0):
    """Greedy map-equation community detection.

    Each trial starts from singleton modules under a seeded vertex shuffle;
    the best trial (lowest codelength, ties by lexicographically smallest
    canonical assignment) wins. Output community ids are ordered by total
    member visit mass, so id 0 is the top community.

    Returns (CommunityAssignment, Codelength).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if rng_seed < 0:
        raise ValueError(f"rng seed must be non-negative, got {rng_seed}")
    arr = flow_arrays(flow, p)

    # the trivial partitions compete with the trials, so the result is never
    # worse than either baseline even when the greedy stalls
    candidates = [np.zeros(arr.n, dtype=np.int64), np.arange(arr.n, dtype=np.int64)]
    for trial in range(trials):
        rng = np.random.default_rng([rng_seed, trial])
        candidates.append(canonical_membership(_run_trial(arr, rng)))

    best_key = None
    best_membership = None
    for canon in candidates:
        bits = _codelength_arrays(arr, canon).bits
        key = (bits, tuple(int(c) for c in canon))
        if best_key is None or key < best_key:
            best_key = key
            best_membership = canon

    elements = _elements_of(flow)
    tmp = CommunityAssignment(best_membership, elements)
    ranked = community_pagerank_order(tmp, arr.p)
    rank_of = {cid: pos for pos, cid in enumerate(ranked)}
    final = np.array([rank_of[int(c)] for c in best_membership], dtype=np.int64)
    assign = CommunityAssignment(final, elements)
    return assign, _codelength_arrays(arr, final)
