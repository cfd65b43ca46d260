"""Cross-layer vertex alignments: truth sets and seed subsets."""

from __future__ import annotations

from typing import Iterable

from .errors import AlignmentError, ParseError
from .graph import Graph


class AlignmentSet:
    """A partial matching of layer-1 labels to layer-2 labels.

    Each label may appear in at most one pair per side. Pairs are kept in
    sorted order so identical sets compare and serialize identically.
    """

    def __init__(self, pairs: Iterable[tuple[str, str]]):
        self.pairs: tuple[tuple[str, str], ...] = tuple(sorted(set(pairs)))
        left = [a for a, _ in self.pairs]
        right = [b for _, b in self.pairs]
        if len(set(left)) != len(left) or len(set(right)) != len(right):
            raise AlignmentError("alignment is not a matching: a label repeats on one side")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __contains__(self, pair) -> bool:
        return pair in set(self.pairs)

    def __eq__(self, other) -> bool:
        return isinstance(other, AlignmentSet) and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.pairs)

    def validate_layers(self, g1: Graph, g2: Graph) -> None:
        for a, b in self.pairs:
            if not g1.has_label(a) or not g2.has_label(b):
                raise AlignmentError(f"pair ({a!r}, {b!r}) references a missing label")

    def subset_of(self, other: "AlignmentSet") -> bool:
        return set(self.pairs) <= set(other.pairs)

    def to_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for a, b in self.pairs:
                fh.write(f"{a}\t{b}\n")


class SeedSet(AlignmentSet):
    """The known subset of an alignment used to couple the two layers."""

    def assert_subset_of(self, truth: AlignmentSet) -> None:
        if not self.subset_of(truth):
            raise AlignmentError("seed set is not a subset of the truth alignment")


def read_alignment_tsv(path, cls=AlignmentSet, forbid_hashtags: bool = True):
    """Read `label_layer1<TAB>label_layer2` pairs, one per line.

    Hashtags are aligned by exact string match, never listed as pairs, so a
    '#'-prefixed label in the file is rejected unless explicitly allowed.
    """
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ParseError(f"expected 2 tab-separated fields, got {len(fields)}",
                                 line=lineno)
            a, b = fields
            if not a or not b:
                raise ParseError("empty label in alignment pair", line=lineno)
            if forbid_hashtags and (a.startswith("#") or b.startswith("#")):
                raise ParseError(f"hashtag label {a!r}/{b!r} cannot be an alignment pair",
                                 line=lineno)
            pairs.append((a, b))
    return cls(pairs)
