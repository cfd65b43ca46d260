"""Overlap-controlled sampling, synthetic benchmark graphs, and the sweep
harness that scans (overlap, seed strategy, seed fraction, method) grids."""

from __future__ import annotations

import hashlib
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import mapeq
from .alignment import AlignmentSet, SeedSet, read_alignment_tsv
from .flow import pagerank
from .graph import Graph, VertexKind
from .metrics import contingency, oracle_accuracy, variation_of_information
from .multilayer import build, project_assignment
from .seedsel import select_seeds

logger = logging.getLogger(__name__)

CSV_HEADER = ("method,overlap,strategy,seed_fraction,trial,"
              "vi_bits,oracle_accuracy,codelength_bits,num_communities")

_CEIL_EPS = 1e-9  # guards ceil() against float noise in f * m


def derive_seed(master: int, *parts) -> int:
    """Stable 64-bit sub-seed for one named stage of a seeded pipeline."""
    key = "|".join([str(master), *(str(p) for p in parts)])
    return int.from_bytes(hashlib.blake2b(key.encode(), digest_size=8).digest(), "big")


@dataclass(frozen=True)
class OverlapSpec:
    """Two equally sized random subgraphs sharing a controlled vertex fraction."""

    fraction: float
    m: int
    rng_seed: int

    def shared_count(self) -> int:
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError(f"overlap fraction must be in (0, 1], got {self.fraction}")
        return math.ceil(self.fraction * self.m - _CEIL_EPS)


def sample_overlap(base: Graph, spec: OverlapSpec) -> tuple[Graph, Graph, AlignmentSet]:
    """Draw two vertex-induced subgraphs of `base` with a shared vertex set.

    Returns (g1, g2, truth) where truth pairs every shared user vertex with
    itself; shared hashtags align by string match and stay out of the truth.
    """
    s = spec.shared_count()
    extra = spec.m - s
    needed = 2 * spec.m - s
    if needed > base.n:
        raise ValueError(
            f"base graph has {base.n} vertices, need {needed} "
            f"for m={spec.m} at overlap {spec.fraction}"
        )
    rng = np.random.default_rng(spec.rng_seed)
    shared = rng.choice(base.n, size=s, replace=False)
    rest = np.setdiff1d(np.arange(base.n), shared)
    picked = rng.choice(rest, size=2 * extra, replace=False)
    only1, only2 = picked[:extra], picked[extra:]

    labels1 = [base.labels[int(v)] for v in np.concatenate([shared, only1])]
    labels2 = [base.labels[int(v)] for v in np.concatenate([shared, only2])]
    g1 = base.induced_subgraph(labels1)
    g2 = base.induced_subgraph(labels2)
    truth = AlignmentSet(
        (base.labels[int(v)], base.labels[int(v)])
        for v in shared
        if base.kinds[int(v)] == VertexKind.USER
    )
    return g1, g2, truth


def planted_partition(blocks: int = 10, block_size: int = 100,
                      p_in: float = 0.1, p_out: float = 0.005,
                      rng_seed: int = 0) -> Graph:
    """Unit-weight planted-partition graph with labeled user vertices.

    Each within-block pair is an edge with probability p_in, each
    cross-block pair with probability p_out.
    """
    n = blocks * block_size
    rng = np.random.default_rng(rng_seed)
    block = np.repeat(np.arange(blocks), block_size)
    probs = np.where(block[:, None] == block[None, :], p_in, p_out)
    draws = rng.random((n, n))
    iu = np.triu_indices(n, k=1)
    hit = draws[iu] < probs[iu]
    width_b = len(str(blocks - 1))
    width_i = len(str(block_size - 1))
    labels = [f"u{b:0{width_b}d}x{i:0{width_i}d}"
              for b in range(blocks) for i in range(block_size)]
    weighted = {
        (labels[int(u)], labels[int(v)]): 1.0
        for u, v in zip(iu[0][hit], iu[1][hit])
    }
    return Graph.from_weighted_edges(weighted, extra_labels=labels)


@dataclass
class SweepResult:
    method: str
    overlap: float
    strategy: str
    seed_fraction: float
    trial: int
    vi_bits: float
    oracle_accuracy: float
    codelength_bits: float
    num_communities: int

    def as_csv_row(self) -> str:
        return ",".join([
            self.method,
            repr(float(self.overlap)),
            self.strategy,
            repr(float(self.seed_fraction)),
            str(self.trial),
            repr(float(self.vi_bits)),
            repr(float(self.oracle_accuracy)),
            repr(float(self.codelength_bits)),
            str(self.num_communities),
        ])


@dataclass
class SweepConfig:
    """Grid description for run_sweep; see README for the JSON schema."""

    methods: list[str]
    strategies: list[str]
    seed_fractions: list[float]
    trials: int
    rng_seed: int
    reference: str = "base"  # base | pair-full-seeds
    # base-graph mode
    base_graph: Graph | None = None
    overlaps: list[float] = field(default_factory=list)
    subgraph_size: int | None = None
    # two-layer mode
    layer1: Graph | None = None
    layer2: Graph | None = None
    truth: AlignmentSet | None = None
    # construction and detection knobs
    omega: float = 1.0
    relax_rate: float = 0.85
    combine: str = "sum"
    detect_trials: int = 10
    seed_scores: str | None = None  # base | pair-average

    def __post_init__(self):
        if self.reference not in ("base", "pair-full-seeds"):
            raise ValueError(f"unknown reference mode {self.reference!r}")
        two_layer = self.layer1 is not None
        if two_layer:
            if self.layer2 is None or self.truth is None:
                raise ValueError("two-layer mode needs layer1, layer2 and truth")
            if self.reference == "base":
                raise ValueError("reference 'base' needs a base graph")
        else:
            if self.base_graph is None:
                raise ValueError("need either base_graph or layer1+layer2+truth")
            if not self.overlaps or self.subgraph_size is None:
                raise ValueError("base-graph mode needs overlaps and subgraph_size")
        if self.seed_scores is None:
            self.seed_scores = "base" if not two_layer else "pair-average"
        if self.seed_scores == "base" and self.base_graph is None:
            raise ValueError("seed_scores 'base' needs a base graph")
        for m in self.methods:
            if m not in ("aggregation", "linking", "relaxed"):
                raise ValueError(f"unknown method {m!r}")

    @property
    def two_layer(self) -> bool:
        return self.layer1 is not None

    @classmethod
    def from_dict(cls, obj: dict, load_graph=Graph.load, load_truth=read_alignment_tsv):
        obj = dict(obj)
        for key, loader in (("base_graph", load_graph), ("layer1", load_graph),
                            ("layer2", load_graph), ("truth", load_truth)):
            if obj.get(key) is not None and isinstance(obj[key], str):
                obj[key] = loader(obj[key])
        return cls(**obj)


def _seeds_digest(seeds: SeedSet) -> str:
    text = "\n".join(f"{a}\t{b}" for a, b in seeds.pairs)
    return hashlib.blake2b(text.encode(), digest_size=8).hexdigest()


def _degree_table(g: Graph) -> dict[str, float]:
    return {lab: g.strength(v) for v, lab in enumerate(g.labels)}


def _pagerank_table(g: Graph) -> dict[str, float]:
    pr = pagerank(g)
    return {lab: float(pr.p[v]) for v, lab in enumerate(g.labels)}


def _base_scores(cfg: SweepConfig) -> dict[str, dict]:
    tables = {}
    if "degree" in cfg.strategies:
        tables["degree"] = _degree_table(cfg.base_graph)
    if "pagerank" in cfg.strategies:
        tables["pagerank"] = _pagerank_table(cfg.base_graph)
    return tables


def _detect_projected(cfg: SweepConfig, g1, g2, seeds, method, overlap_key, trial):
    """Build + detect + project for one seed set; rng depends on what is
    detected (the seed content), so equal seed sets detect identically."""
    detectable, state_map = build(method, g1, g2, seeds, omega=cfg.omega,
                                  relax_rate=cfg.relax_rate, combine=cfg.combine)
    seed_val = derive_seed(cfg.rng_seed, "detect", overlap_key, trial, method,
                           _seeds_digest(seeds))
    assign, cl = mapeq.detect(detectable, trials=cfg.detect_trials, rng_seed=seed_val)
    return project_assignment(assign, state_map), assign, cl


def _sweep_group(cfg: SweepConfig, overlap, trial: int,
                 base_ref: dict | None, base_tables: dict) -> list[SweepResult]:
    """All rows of one (overlap, trial) cell, in strategy/fraction/method order."""
    overlap_key = "fixed" if cfg.two_layer else repr(float(overlap))
    if cfg.two_layer:
        g1, g2, truth = cfg.layer1, cfg.layer2, cfg.truth
        overlap_val = float("nan")
    else:
        spec = OverlapSpec(fraction=overlap, m=cfg.subgraph_size,
                           rng_seed=derive_seed(cfg.rng_seed, "sample", overlap_key, trial))
        g1, g2, truth = sample_overlap(cfg.base_graph, spec)
        overlap_val = float(overlap)

    if cfg.seed_scores == "pair-average":
        pair_tables = {}
        if "degree" in cfg.strategies:
            pair_tables["degree"] = (_degree_table(g1), _degree_table(g2))
        if "pagerank" in cfg.strategies:
            pair_tables["pagerank"] = (_pagerank_table(g1), _pagerank_table(g2))
    else:
        pair_tables = base_tables

    detected_cache: dict[tuple, dict] = {}

    def detect_cached(seeds, method):
        key = (method, _seeds_digest(seeds))
        if key not in detected_cache:
            projected, assign, cl = _detect_projected(cfg, g1, g2, seeds, method,
                                                      overlap_key, trial)
            detected_cache[key] = (projected, assign, cl)
        return detected_cache[key]

    def reference_for(method):
        if cfg.reference == "base":
            return base_ref
        projected, _, _ = detect_cached(SeedSet(truth.pairs), method)
        return projected

    rows = []
    for strategy in cfg.strategies:
        for fraction in cfg.seed_fractions:
            try:
                seeds = select_seeds(
                    truth, strategy, fraction,
                    rng_seed=derive_seed(cfg.rng_seed, "seeds", overlap_key, trial,
                                         strategy, repr(float(fraction))),
                    scores=pair_tables.get(strategy),
                )
            except Exception:
                logger.warning("seed selection failed: overlap=%s trial=%d strategy=%s "
                               "fraction=%s", overlap_key, trial, strategy, fraction,
                               exc_info=True)
                continue
            for method in cfg.methods:
                try:
                    projected, assign, cl = detect_cached(seeds, method)
                    ref = reference_for(method)
                    vi = variation_of_information(contingency(ref, projected))
                    if len(seeds) < len(truth):
                        oa = oracle_accuracy(truth, seeds, projected)
                    else:
                        oa = float("nan")  # no non-seed pairs left to evaluate
                    rows.append(SweepResult(
                        method=method, overlap=overlap_val, strategy=strategy,
                        seed_fraction=float(fraction), trial=trial, vi_bits=vi,
                        oracle_accuracy=oa, codelength_bits=cl.bits,
                        num_communities=assign.num_communities,
                    ))
                except Exception:
                    logger.warning("row failed: overlap=%s trial=%d strategy=%s "
                                   "fraction=%s method=%s", overlap_key, trial,
                                   strategy, fraction, method, exc_info=True)
    return rows


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> Iterator[SweepResult]:
    """Yield one SweepResult per completed run, in deterministic order.

    Rows come out nested overlap -> trial -> strategy -> seed_fraction ->
    method. Failed rows are logged and skipped. With jobs > 1 the
    (overlap, trial) cells run in separate processes; output order and
    content do not change.
    """
    if not cfg.methods:
        return
    base_ref = None
    base_tables: dict = {}
    if cfg.reference == "base":
        assign, _ = mapeq.detect(cfg.base_graph, trials=cfg.detect_trials,
                                 rng_seed=derive_seed(cfg.rng_seed, "ref-base"))
        base_ref = {}
        for label, cid in zip(cfg.base_graph.labels, assign.membership):
            base_ref[(1, label)] = int(cid)
            base_ref[(2, label)] = int(cid)
    if cfg.seed_scores == "base":
        base_tables = _base_scores(cfg)

    overlaps = [None] if cfg.two_layer else list(cfg.overlaps)
    cells = [(ov, t) for ov in overlaps for t in range(cfg.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_sweep_group, cfg, ov, t, base_ref, base_tables)
                       for ov, t in cells]
            for fut in futures:
                yield from fut.result()
    else:
        for ov, t in cells:
            yield from _sweep_group(cfg, ov, t, base_ref, base_tables)


def write_sweep_csv(results, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in results:
            fh.write(row.as_csv_row() + "\n")
