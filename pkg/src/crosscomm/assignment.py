"""Community assignments over a declared element set."""

from __future__ import annotations

from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import ParseError


class CommunityAssignment:
    """Maps every element of a universe to a dense community id 0..K-1.

    `elements` names the universe: vertex labels for a plain graph, or
    (layer, label) identities for multilayer state spaces.
    """

    def __init__(self, membership: Sequence[int], elements: Sequence[Hashable]):
        self.membership = np.asarray(membership, dtype=np.int64)
        self.elements = tuple(elements)
        if len(self.membership) != len(self.elements):
            raise ValueError("membership and elements differ in length")
        if len(self.elements) == 0:
            raise ValueError("empty assignment")
        if self.membership.min() < 0:
            raise ValueError("community ids must be non-negative")
        k = int(self.membership.max()) + 1
        if len(np.unique(self.membership)) != k:
            raise ValueError("community ids must be contiguous 0..K-1")
        self.num_communities = k

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CommunityAssignment)
            and self.elements == other.elements
            and np.array_equal(self.membership, other.membership)
        )

    def community_of(self, element: Hashable) -> int:
        try:
            return int(self.membership[self.elements.index(element)])
        except ValueError:
            raise KeyError(element)

    def as_dict(self) -> dict[Hashable, int]:
        return {e: int(c) for e, c in zip(self.elements, self.membership)}

    def communities(self) -> list[list[Hashable]]:
        groups: list[list[Hashable]] = [[] for _ in range(self.num_communities)]
        for e, c in zip(self.elements, self.membership):
            groups[int(c)].append(e)
        return groups


def canonical_membership(membership: np.ndarray) -> np.ndarray:
    """Relabel community ids in order of first appearance along the index."""
    out = np.empty_like(membership)
    seen: dict[int, int] = {}
    for i, c in enumerate(membership):
        c = int(c)
        if c not in seen:
            seen[c] = len(seen)
        out[i] = seen[c]
    return out


def as_element_dict(assign) -> dict[Hashable, int]:
    """Accept a CommunityAssignment or a plain element -> community mapping."""
    if isinstance(assign, CommunityAssignment):
        return assign.as_dict()
    if isinstance(assign, Mapping):
        return dict(assign)
    raise TypeError(f"not an assignment: {type(assign)!r}")


# --- assignment TSV: label<TAB>layer<TAB>community_id -----------------------

def write_assignment_tsv(path, assign: Mapping) -> None:
    """Write a per-(layer, label) assignment; layer '*' means both layers."""
    with open(path, "w", encoding="utf-8") as fh:
        for (layer, label), cid in sorted(assign.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])):
            fh.write(f"{label}\t{layer}\t{cid}\n")


def read_assignment_tsv(path) -> dict[tuple, int]:
    """Read assignment rows; '*' layer rows are replicated onto layers 1 and 2."""
    out: dict[tuple, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ParseError(f"expected 3 tab-separated fields, got {len(fields)}",
                                 line=lineno)
            label, layer, cid_s = fields
            try:
                cid = int(cid_s)
            except ValueError:
                raise ParseError(f"community id is not an integer: {cid_s!r}", line=lineno)
            if layer == "*":
                out[(1, label)] = cid
                out[(2, label)] = cid
            elif layer in ("1", "2"):
                out[(int(layer), label)] = cid
            else:
                raise ParseError(f"unknown layer {layer!r} (expected 1, 2 or *)", line=lineno)
    return out
