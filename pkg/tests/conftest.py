import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from crosscomm.experiments import SweepConfig, planted_partition, run_sweep

# The trend sweeps sample two m-vertex layers from a fixed 1000-vertex
# population, so the union size stays ~1000 at every overlap fraction f:
# m = 1000 / (2 - f). Holding the union fixed isolates the shared-fraction
# effect from sample-sparsity effects (the subgraph size is a free parameter).
UNION_M = {0.1: 526, 0.5: 666, 0.9: 909}


@pytest.fixture(scope="session")
def planted_base():
    """The 10-block planted-partition benchmark graph used by the trend tests."""
    return planted_partition(blocks=10, block_size=100, p_in=0.1, p_out=0.005,
                             rng_seed=7)


@pytest.fixture(scope="session")
def table1_rows(planted_base):
    """Full-seed sweeps against the base-graph reference, all three methods."""
    rows = []
    for overlap, m in UNION_M.items():
        cfg = SweepConfig(
            methods=["aggregation", "linking", "relaxed"],
            strategies=["random"],
            seed_fractions=[1.0],
            trials=10,
            rng_seed=1001,
            reference="base",
            base_graph=planted_base,
            overlaps=[overlap],
            subgraph_size=m,
        )
        rows.extend(run_sweep(cfg))
    return rows


@pytest.fixture(scope="session")
def seed_strategy_rows(planted_base):
    """Seed-fraction sweep at 90% overlap, pair-full-seeds reference."""
    cfg = SweepConfig(
        methods=["aggregation"],
        strategies=["random", "pagerank"],
        seed_fractions=[0.05, 0.1, 0.3],
        trials=10,
        rng_seed=2002,
        reference="pair-full-seeds",
        base_graph=planted_base,
        overlaps=[0.9],
        subgraph_size=UNION_M[0.9],
        seed_scores="base",
    )
    return list(run_sweep(cfg))


@pytest.fixture(scope="session")
def degree_strategy_rows(planted_base):
    """Degree vs random at 90% overlap and a small seed fraction."""
    cfg = SweepConfig(
        methods=["aggregation"],
        strategies=["random", "degree"],
        seed_fractions=[0.1],
        trials=10,
        rng_seed=3003,
        reference="pair-full-seeds",
        base_graph=planted_base,
        overlaps=[0.9],
        subgraph_size=UNION_M[0.9],
        seed_scores="base",
    )
    return list(run_sweep(cfg))


def mean_field(rows, field, **filters):
    picked = [r for r in rows
              if all(getattr(r, key) == val for key, val in filters.items())]
    assert picked, f"no rows match {filters}"
    vals = [getattr(r, field) for r in picked]
    return sum(vals) / len(vals)
