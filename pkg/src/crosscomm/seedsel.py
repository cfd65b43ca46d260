"""Seed selection strategies: random, degree and PageRank centrality."""

from __future__ import annotations

import random
from typing import Mapping

from .alignment import AlignmentSet, SeedSet
from .errors import CrosscommError

STRATEGIES = ("random", "degree", "pagerank")


class ScoringError(CrosscommError, KeyError):
    """A truth-pair label has no centrality score."""


def _round_half_up(x: float) -> int:
    return int(x + 0.5)


def _pair_score(pair, scores):
    a, b = pair
    if isinstance(scores, Mapping):
        # single-network reference mode: score on the base graph
        if a not in scores:
            raise ScoringError(f"no score for label {a!r}")
        return scores[a]
    s1, s2 = scores
    if a not in s1:
        raise ScoringError(f"no score for label {a!r} in layer 1")
    if b not in s2:
        raise ScoringError(f"no score for label {b!r} in layer 2")
    return (s1[a] + s2[b]) / 2.0


def select_seeds(truth: AlignmentSet, strategy: str, fraction: float,
                 rng_seed: int | None = None, scores=None) -> SeedSet:
    """Pick round(fraction * |truth|) pairs from the truth alignment.

    random: uniform without replacement under rng_seed. degree / pagerank:
    top-k by score, descending, ties by lexicographic pair. `scores` is one
    label -> score table (scored on a single reference network) or a pair of
    per-layer tables whose values are averaged per truth pair.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r} (expected {'|'.join(STRATEGIES)})")
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    k = _round_half_up(fraction * len(truth))
    pairs = list(truth.pairs)  # already sorted
    if k == 0:
        return SeedSet([])
    if k >= len(pairs):
        return SeedSet(pairs)

    if strategy == "random":
        if rng_seed is None:
            raise ValueError("random strategy needs an rng seed")
        chosen = random.Random(rng_seed).sample(pairs, k)
    else:
        if scores is None:
            raise ValueError(f"{strategy} strategy needs centrality scores")
        scored = sorted(pairs, key=lambda pr: (-_pair_score(pr, scores), pr))
        chosen = scored[:k]
    return SeedSet(chosen)
