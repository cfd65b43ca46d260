"""Weighted undirected labeled graphs: ingestion, strengths, normalization, serialization.

Vertices are dense integer ids 0..n-1 assigned in sorted-label order, so a
graph built from the same set of records is identical regardless of record
order. Edges are stored once per unordered pair (u <= v) with a positive
real weight; self-loops are allowed and count twice in a vertex strength.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

import numpy as np
from scipy import sparse

from .errors import ParseError

COMMENT_PREFIX = "//"


class VertexKind(str, Enum):
    USER = "user"
    HASHTAG = "hashtag"


def kind_of(label: str) -> VertexKind:
    """Hashtag vertices are exactly those whose label starts with '#'."""
    return VertexKind.HASHTAG if label.startswith("#") else VertexKind.USER


@dataclass(frozen=True)
class EdgeRecord:
    """One raw interaction record before edge-type counts are collapsed."""

    src: str
    dst: str
    etype: str
    count: int


class Graph:
    """Immutable weighted undirected graph with unique string vertex labels."""

    def __init__(self, labels, kinds, edges):
        """Build from parallel label/kind lists and canonical (u, v, w) edges.

        `edges` must already be deduplicated with u <= v and w > 0; use the
        classmethods for anything coming from raw data.
        """
        self.labels = list(labels)
        self.kinds = list(kinds)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise ValueError("duplicate vertex labels")
        edges = sorted(edges)
        self.edge_u = np.array([e[0] for e in edges], dtype=np.int64)
        self.edge_v = np.array([e[1] for e in edges], dtype=np.int64)
        self.edge_w = np.array([e[2] for e in edges], dtype=np.float64)
        if np.any(self.edge_u > self.edge_v):
            raise ValueError("edges must be stored with u <= v")
        if np.any(self.edge_w <= 0):
            raise ValueError("edge weights must be positive")
        self._strengths = np.zeros(self.n, dtype=np.float64)
        np.add.at(self._strengths, self.edge_u, self.edge_w)
        np.add.at(self._strengths, self.edge_v, self.edge_w)
        # self-loops got w from each endpoint above, which is the wanted
        # count-twice convention.

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return len(self.edge_w)

    @property
    def total_weight(self) -> float:
        return float(self.edge_w.sum())

    def vertex_id(self, label: str) -> int:
        return self._index[label]

    def has_label(self, label: str) -> bool:
        return label in self._index

    def strength(self, v: int) -> float:
        """Weighted degree of v, self-loop weight counted twice."""
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range (n={self.n})")
        return float(self._strengths[v])

    def strengths(self) -> np.ndarray:
        return self._strengths.copy()

    def edges(self) -> Iterator[tuple[int, int, float]]:
        for u, v, w in zip(self.edge_u, self.edge_v, self.edge_w):
            yield int(u), int(v), float(w)

    @classmethod
    def from_weighted_edges(cls, weighted: dict[tuple[str, str], float],
                            extra_labels: Iterable[str] = ()) -> "Graph":
        """Build from {(label_u, label_v): weight}; ids follow sorted labels."""
        labels = set(extra_labels)
        for a, b in weighted:
            labels.add(a)
            labels.add(b)
        labels = sorted(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        acc: dict[tuple[int, int], float] = {}
        for (a, b), w in weighted.items():
            u, v = index[a], index[b]
            if u > v:
                u, v = v, u
            acc[(u, v)] = acc.get((u, v), 0.0) + w
        edges = [(u, v, w) for (u, v), w in acc.items()]
        return cls(labels, [kind_of(lab) for lab in labels], edges)

    def induced_subgraph(self, keep_labels: Iterable[str]) -> "Graph":
        """Vertex-induced subgraph on the given labels, weights preserved."""
        keep = set(keep_labels)
        missing = [lab for lab in keep if lab not in self._index]
        if missing:
            raise KeyError(f"labels not in graph: {sorted(missing)[:5]}")
        weighted = {}
        for u, v, w in self.edges():
            lu, lv = self.labels[u], self.labels[v]
            if lu in keep and lv in keep:
                weighted[(lu, lv)] = w
        return Graph.from_weighted_edges(weighted, extra_labels=keep)

    def transition(self) -> tuple[sparse.csr_matrix, np.ndarray]:
        """Row-stochastic random-walk transition matrix; see left_normalize."""
        return left_normalize(self)

    # --- serialization ----------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "vertices": [
                {"label": lab, "kind": kind.value}
                for lab, kind in zip(self.labels, self.kinds)
            ],
            "edges": [[int(u), int(v), float(w)] for u, v, w in self.edges()],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Graph":
        labels = [v["label"] for v in obj["vertices"]]
        kinds = [VertexKind(v["kind"]) for v in obj["vertices"]]
        edges = [(int(u), int(v), float(w)) for u, v, w in obj["edges"]]
        return cls(labels, kinds, edges)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_obj(), fh)

    @classmethod
    def load(cls, path) -> "Graph":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_obj(json.load(fh))


def graphs_equal(a: Graph, b: Graph, tol: float = 0.0) -> bool:
    """Label-keyed structural equality, independent of vertex id numbering."""
    if sorted(a.labels) != sorted(b.labels):
        return False
    if {lab: k for lab, k in zip(a.labels, a.kinds)} != {
        lab: k for lab, k in zip(b.labels, b.kinds)
    }:
        return False

    def edge_dict(g):
        d = {}
        for u, v, w in g.edges():
            key = tuple(sorted((g.labels[u], g.labels[v])))
            d[key] = w
        return d

    ea, eb = edge_dict(a), edge_dict(b)
    if ea.keys() != eb.keys():
        return False
    return all(abs(ea[k] - eb[k]) <= tol for k in ea)


def ingest_edge_lists(records: Iterable[EdgeRecord]) -> Graph:
    """Collapse typed interaction counts into a weighted undirected graph.

    Weights of one unordered label pair are summed over all records and all
    edge types. Vertex kind comes from the '#' prefix rule.
    """
    weighted: dict[tuple[str, str], float] = {}
    labels: set[str] = set()
    for rec in records:
        if not rec.src or not rec.dst:
            raise ParseError("empty vertex label in edge record")
        if rec.count < 1:
            raise ParseError(f"non-positive count {rec.count}")
        labels.add(rec.src)
        labels.add(rec.dst)
        key = (rec.src, rec.dst) if rec.src <= rec.dst else (rec.dst, rec.src)
        weighted[key] = weighted.get(key, 0.0) + float(rec.count)
    return Graph.from_weighted_edges(weighted, extra_labels=labels)


def read_edge_list_tsv(path) -> Iterator[EdgeRecord]:
    """Parse a TSV edge list: src<TAB>dst<TAB>etype<TAB>count per line.

    Lines starting with '//' are comments. A leading '#' is a hashtag label,
    never a comment marker.
    """
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith(COMMENT_PREFIX):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ParseError(f"expected 4 tab-separated fields, got {len(fields)}",
                                 line=lineno)
            src, dst, etype, count_s = fields
            if not src or not dst:
                raise ParseError("empty vertex label", line=lineno)
            if not etype:
                raise ParseError("empty edge type", line=lineno)
            try:
                count = int(count_s)
            except ValueError:
                raise ParseError(f"count is not an integer: {count_s!r}", line=lineno)
            if count < 1:
                raise ParseError(f"count must be >= 1, got {count}", line=lineno)
            yield EdgeRecord(src, dst, etype, count)


def ingest_edge_list_file(path) -> Graph:
    return ingest_edge_lists(read_edge_list_tsv(path))


def left_normalize(g: Graph) -> tuple[sparse.csr_matrix, np.ndarray]:
    """Divide each row of the weighted adjacency by the vertex strength.

    Returns (P, dangling) where P[u, v] is the walk probability u -> v and
    `dangling` flags zero-strength vertices (their rows are all zero). A
    self-loop contributes twice its weight to the u -> u entry so that
    non-dangling rows sum to exactly 1.
    """
    n = g.n
    loops = g.edge_u == g.edge_v
    u = np.concatenate([g.edge_u[~loops], g.edge_v[~loops], g.edge_u[loops]])
    v = np.concatenate([g.edge_v[~loops], g.edge_u[~loops], g.edge_u[loops]])
    w = np.concatenate([g.edge_w[~loops], g.edge_w[~loops], 2.0 * g.edge_w[loops]])
    s = g._strengths
    dangling = s == 0.0
    probs = np.zeros_like(w)
    nz = s[u] > 0
    probs[nz] = w[nz] / s[u[nz]]
    P = sparse.csr_matrix((probs, (u, v)), shape=(n, n))
    P.sum_duplicates()
    P.sort_indices()
    return P, dangling
