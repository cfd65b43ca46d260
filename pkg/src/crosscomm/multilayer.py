"""The three two-layer constructions: aggregation, linking, relaxed random walk.

Each builder couples two weighted undirected layers through a seed set (plus
hashtags auto-aligned by exact string match) and yields either a merged
monoplex Graph (aggregation) or a row-stochastic supra walk (linking and
relaxed), ready for flow-based community detection.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np
from scipy import sparse

from .alignment import SeedSet
from .assignment import CommunityAssignment
from .errors import AlignmentError
from .graph import Graph, VertexKind, left_normalize

ROW_SUM_TOL = 1e-12

LAYER_SUFFIX = "@2"  # disambiguates an unmerged layer-2 label that collides


class FlowGraph:
    """Directed walk over state vertices: each state is one (layer, label).

    Rows of `trans` sum to 1 within tolerance unless the state is dangling
    (zero out-weight). `identity[s]` gives the physical (layer, label) of
    state s, layer 1 or 2.
    """

    def __init__(self, trans: sparse.csr_matrix, dangling: np.ndarray, identity):
        self.trans = trans.tocsr()
        self.trans.sort_indices()
        self.dangling = np.asarray(dangling, dtype=bool)
        self.identity = list(identity)
        m = self.trans.shape[0]
        if len(self.identity) != m or len(self.dangling) != m:
            raise ValueError("identity/dangling length does not match state count")
        sums = np.asarray(self.trans.sum(axis=1)).ravel()
        bad = ~self.dangling & (np.abs(sums - 1.0) > ROW_SUM_TOL)
        if np.any(bad):
            worst = np.max(np.abs(sums[~self.dangling] - 1.0))
            raise ValueError(f"non-stochastic row(s): max |sum-1| = {worst:.3e}")
        if np.any(self.dangling & (sums != 0.0)):
            raise ValueError("dangling state has outgoing weight")

    @property
    def m(self) -> int:
        return self.trans.shape[0]

    def state_index(self) -> dict:
        return {ident: s for s, ident in enumerate(self.identity)}

    def arcs(self):
        """Yield (u, v, probability) in canonical row-then-column order."""
        indptr, indices, data = self.trans.indptr, self.trans.indices, self.trans.data
        for u in range(self.m):
            for k in range(indptr[u], indptr[u + 1]):
                yield u, int(indices[k]), float(data[k])


def _validate_seeds(g1: Graph, g2: Graph, seeds: SeedSet) -> None:
    for a, b in seeds:
        if not g1.has_label(a):
            raise AlignmentError(f"seed pair ({a!r}, {b!r}): {a!r} missing from layer 1")
        if not g2.has_label(b):
            raise AlignmentError(f"seed pair ({a!r}, {b!r}): {b!r} missing from layer 2")


def common_hashtags(g1: Graph, g2: Graph) -> list[str]:
    """Hashtag labels present in both layers; always aligned by string match."""
    tags1 = {lab for lab, k in zip(g1.labels, g1.kinds) if k == VertexKind.HASHTAG}
    tags2 = {lab for lab, k in zip(g2.labels, g2.kinds) if k == VertexKind.HASHTAG}
    return sorted(tags1 & tags2)


def _alignment_maps(g1: Graph, g2: Graph, seeds: SeedSet):
    """Seed pairs plus common hashtags as vertex-id maps, one per direction."""
    fwd: dict[int, int] = {}
    for a, b in seeds:
        fwd[g1.vertex_id(a)] = g2.vertex_id(b)
    for tag in common_hashtags(g1, g2):
        fwd[g1.vertex_id(tag)] = g2.vertex_id(tag)
    bwd = {v: u for u, v in fwd.items()}
    if len(bwd) != len(fwd):
        raise AlignmentError("alignment maps two layer-1 vertices to one layer-2 vertex")
    return fwd, bwd


def build_aggregation(g1: Graph, g2: Graph, seeds: SeedSet,
                      combine: str = "sum") -> tuple[Graph, dict]:
    """Collapse the two layers into one monoplex graph.

    Every seed pair becomes a single vertex, as does every hashtag present in
    both layers. Edge weights of coinciding merged pairs are combined by
    `combine` ("sum" or "mean" over the contributing layer edges). Returns the
    merged graph and a map from every original (layer, label) to its merged
    vertex id.
    """
    if combine not in ("sum", "mean"):
        raise ValueError(f"unknown combine rule {combine!r}")
    _validate_seeds(g1, g2, seeds)
    fwd, _ = _alignment_maps(g1, g2, seeds)

    # Pick a label for every merged vertex. Merged and layer-1 vertices keep
    # their layer-1 label; an unmerged layer-2 label gets a suffix only if the
    # bare string is already taken (same username, different person).
    merged_of_1: dict[int, str] = {}
    merged_of_2: dict[int, str] = {}
    taken: set[str] = set()
    for u in range(g1.n):
        lab = g1.labels[u]
        merged_of_1[u] = lab
        taken.add(lab)
        if u in fwd:
            merged_of_2[fwd[u]] = lab
    for v in range(g2.n):
        if v in merged_of_2:
            continue
        lab = g2.labels[v]
        while lab in taken:
            lab = lab + LAYER_SUFFIX
        merged_of_2[v] = lab
        taken.add(lab)

    sums: dict[tuple[str, str], float] = {}
    counts: dict[tuple[str, str], int] = {}
    for layer_map, g in ((merged_of_1, g1), (merged_of_2, g2)):
        for u, v, w in g.edges():
            a, b = layer_map[u], layer_map[v]
            key = (a, b) if a <= b else (b, a)
            sums[key] = sums.get(key, 0.0) + w
            counts[key] = counts.get(key, 0) + 1
    if combine == "mean":
        weighted = {key: sums[key] / counts[key] for key in sums}
    else:
        weighted = sums

    merged = Graph.from_weighted_edges(weighted, extra_labels=taken)
    merge_map = {}
    for u in range(g1.n):
        merge_map[(1, g1.labels[u])] = merged.vertex_id(merged_of_1[u])
    for v in range(g2.n):
        merge_map[(2, g2.labels[v])] = merged.vertex_id(merged_of_2[v])
    return merged, merge_map


def build_linking(g1: Graph, g2: Graph, seeds: SeedSet, omega: float = 1.0) -> FlowGraph:
    """Keep both vertex sets and join aligned vertices with interlayer edges.

    The supra graph holds each layer's edges on its diagonal block and an
    undirected edge of weight `omega` between the two states of every seed
    pair (and of every common hashtag); the whole thing is then row-normalized.
    """
    if omega <= 0:
        raise ValueError(f"interlayer weight must be positive, got {omega}")
    _validate_seeds(g1, g2, seeds)
    fwd, _ = _alignment_maps(g1, g2, seeds)

    n1 = g1.n
    m = n1 + g2.n
    rows, cols, vals = [], [], []

    def add_graph(g: Graph, offset: int):
        for u, v, w in g.edges():
            if u == v:
                rows.append(u + offset)
                cols.append(u + offset)
                vals.append(2.0 * w)
            else:
                rows.extend((u + offset, v + offset))
                cols.extend((v + offset, u + offset))
                vals.extend((w, w))

    add_graph(g1, 0)
    add_graph(g2, n1)
    for u, v in sorted(fwd.items()):
        rows.extend((u, v + n1))
        cols.extend((v + n1, u))
        vals.extend((omega, omega))

    W = sparse.csr_matrix(
        (np.array(vals), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=(m, m),
    )
    W.sum_duplicates()
    out_strength = np.asarray(W.sum(axis=1)).ravel()
    dangling = out_strength == 0.0
    scale = np.where(dangling, 1.0, out_strength)
    P = sparse.csr_matrix(W.multiply(1.0 / scale[:, None]))

    identity = [(1, lab) for lab in g1.labels] + [(2, lab) for lab in g2.labels]
    return FlowGraph(P, dangling, identity)


def build_relaxed(g1: Graph, g2: Graph, seeds: SeedSet, relax_rate: float = 0.85) -> FlowGraph:
    """Walk that stays in-layer with probability r and otherwise jumps to the
    neighbors of the aligned counterpart.

    An aligned state mixes its own row-normalized neighborhood (weight r) with
    its counterpart's (weight 1-r); an unaligned state keeps all its mass
    in-layer. If the counterpart is dangling the relaxation mass returns to the
    state's own neighborhood (and vice versa), keeping rows stochastic.
    """
    r = relax_rate
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"relax rate must be in [0, 1], got {r}")
    _validate_seeds(g1, g2, seeds)
    fwd, bwd = _alignment_maps(g1, g2, seeds)

    P1, dang1 = left_normalize(g1)
    P2, dang2 = left_normalize(g2)
    n1 = g1.n
    m = n1 + g2.n

    rows, cols, vals = [], [], []

    def add_row(state: int, P: sparse.csr_matrix, src: int, offset: int, weight: float):
        if weight == 0.0:
            return
        lo, hi = P.indptr[src], P.indptr[src + 1]
        for k in range(lo, hi):
            rows.append(state)
            cols.append(int(P.indices[k]) + offset)
            vals.append(weight * float(P.data[k]))

    dangling = np.zeros(m, dtype=bool)

    def emit(state, own_P, own_v, own_off, own_dang, twin, twin_P, twin_off, twin_dang):
        if twin is None:
            if own_dang:
                dangling[state] = True
            else:
                add_row(state, own_P, own_v, own_off, 1.0)
        elif own_dang and twin_dang:
            dangling[state] = True
        elif twin_dang:
            add_row(state, own_P, own_v, own_off, 1.0)
        elif own_dang:
            add_row(state, twin_P, twin, twin_off, 1.0)
        else:
            add_row(state, own_P, own_v, own_off, r)
            add_row(state, twin_P, twin, twin_off, 1.0 - r)

    for u in range(n1):
        twin = fwd.get(u)
        emit(u, P1, u, 0, bool(dang1[u]),
             twin, P2, n1, bool(dang2[twin]) if twin is not None else False)
    for v in range(g2.n):
        twin = bwd.get(v)
        emit(v + n1, P2, v, n1, bool(dang2[v]),
             twin, P1, 0, bool(dang1[twin]) if twin is not None else False)

    P = sparse.csr_matrix(
        (np.array(vals), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=(m, m),
    )
    P.sum_duplicates()
    identity = [(1, lab) for lab in g1.labels] + [(2, lab) for lab in g2.labels]
    return FlowGraph(P, dangling, identity)


def build(method: str, g1: Graph, g2: Graph, seeds: SeedSet, *,
          omega: float = 1.0, relax_rate: float = 0.85, combine: str = "sum"):
    """Dispatch on the method selector string `aggregation|linking|relaxed`.

    Returns (detectable, state_map) where detectable is a Graph or FlowGraph
    and state_map sends every (layer, label) to its vertex/state id.
    """
    if method == "aggregation":
        merged, merge_map = build_aggregation(g1, g2, seeds, combine=combine)
        return merged, merge_map
    if method == "linking":
        fg = build_linking(g1, g2, seeds, omega=omega)
        return fg, fg.state_index()
    if method == "relaxed":
        fg = build_relaxed(g1, g2, seeds, relax_rate=relax_rate)
        return fg, fg.state_index()
    raise ValueError(f"unknown method {method!r} (expected aggregation|linking|relaxed)")


def project_assignment(assign: CommunityAssignment, state_map: Mapping) -> dict:
    """Resolve a state/vertex-level assignment to physical (layer, label) keys.

    For aggregation both members of a merged pair inherit the merged vertex's
    community; for linking/relaxed each layer copy reports its own.
    """
    if len(state_map) == 0:
        raise ValueError("empty state map")
    membership = assign.membership
    out = {}
    for key, state in state_map.items():
        if not 0 <= state < len(membership):
            raise KeyError(f"state {state} for {key!r} not covered by the assignment")
        out[key] = int(membership[state])
    return out
