"""Partition-comparison measures: contingency, Jaccard matrix, variation of
information, and seed-pair oracle accuracy."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .alignment import AlignmentSet, SeedSet
from .assignment import as_element_dict


@dataclass
class ContingencyMatrix:
    """counts[i, j] = size of the overlap of reference community row_ids[i]
    and test community col_ids[j], over the shared element set."""

    counts: np.ndarray
    row_ids: list[int]
    col_ids: list[int]

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)


@dataclass
class JaccardMatrix:
    values: np.ndarray
    row_ids: list[int]
    col_ids: list[int]

    def write_csv(self, path) -> None:
        """Community-id header row and column, one Jaccard index per cell."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([""] + [str(c) for c in self.col_ids])
            for rid, row in zip(self.row_ids, self.values):
                writer.writerow([str(rid)] + [repr(float(x)) for x in row])


def contingency(reference, test) -> ContingencyMatrix:
    """Joint membership counts of two partitions over their common elements.

    Accepts CommunityAssignment objects or plain element -> community-id
    mappings; elements outside the intersection are ignored.
    """
    ref = as_element_dict(reference)
    tst = as_element_dict(test)
    common = ref.keys() & tst.keys()
    if not common:
        raise ValueError("the two assignments share no elements")
    row_ids = sorted({ref[e] for e in common})
    col_ids = sorted({tst[e] for e in common})
    ri = {c: i for i, c in enumerate(row_ids)}
    ci = {c: j for j, c in enumerate(col_ids)}
    counts = np.zeros((len(row_ids), len(col_ids)), dtype=np.int64)
    for e in common:
        counts[ri[ref[e]], ci[tst[e]]] += 1
    return ContingencyMatrix(counts=counts, row_ids=row_ids, col_ids=col_ids)


def jaccard_matrix(N: ContingencyMatrix) -> JaccardMatrix:
    """J[i, j] = |overlap| / |union| for each community pair."""
    inter = N.counts.astype(np.float64)
    union = N.row_sums[:, None] + N.col_sums[None, :] - inter
    return JaccardMatrix(values=inter / union, row_ids=list(N.row_ids),
                         col_ids=list(N.col_ids))


def variation_of_information(N: ContingencyMatrix) -> float:
    """VI(C, C') = H(C|C') + H(C'|C) in bits; a metric between partitions."""
    n = N.n
    pij = N.counts / n
    pi = N.row_sums[:, None] / n
    qj = N.col_sums[None, :] / n
    nz = pij > 0
    terms = pij[nz] * (
        np.log2(pij[nz] / np.broadcast_to(pi, pij.shape)[nz])
        + np.log2(pij[nz] / np.broadcast_to(qj, pij.shape)[nz])
    )
    # summing in sorted order makes VI(C, C') == VI(C', C) bit-exact: the term
    # multiset is transpose-invariant, so the rounding sequence is too
    return float(-np.sort(terms).sum()) + 0.0  # avoid -0.0


def oracle_accuracy(truth: AlignmentSet, seeds: SeedSet, assign: Mapping) -> float:
    """Fraction of non-seed truth pairs whose two copies share a community.

    `assign` maps (layer, label) to a community id, as produced by
    project_assignment. The evaluation set is truth minus seeds; an empty one
    is an error, never a silent 1.0.
    """
    seed_pairs = set(seeds.pairs)
    eval_pairs = [pr for pr in truth.pairs if pr not in seed_pairs]
    if not eval_pairs:
        raise ValueError("no non-seed truth pairs to evaluate")
    hits = 0
    for a, b in eval_pairs:
        if assign[(1, a)] == assign[(2, b)]:
            hits += 1
    return hits / len(eval_pairs)


def filter_users_only(assign: Mapping) -> dict:
    """Drop hashtag elements ('#'-prefixed labels) from a projected assignment."""
    return {key: cid for key, cid in assign.items() if not key[1].startswith("#")}
