"""Stationary visit distributions (PageRank) and community ranking."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assignment import CommunityAssignment
from .errors import ConvergenceError
from .graph import Graph
from .multilayer import FlowGraph


@dataclass
class StationaryDistribution:
    """Visit rates of a damped random walk; p >= 0 and sums to 1."""

    p: np.ndarray
    damping: float
    tol: float
    iterations_used: int


def _transition_of(g):
    if isinstance(g, Graph):
        return g.transition()
    if isinstance(g, FlowGraph):
        return g.trans, g.dangling
    raise TypeError(f"expected Graph or FlowGraph, got {type(g)!r}")


def pagerank(g, damping: float = 0.85, tol: float = 1e-10,
             max_iter: int = 1000, start: np.ndarray | None = None) -> StationaryDistribution:
    """Power iteration with uniform teleportation at rate (1 - damping).

    Dangling-vertex mass is spread uniformly each iteration. Converges when
    the L1 change drops below `tol`; raises ConvergenceError otherwise.
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError(f"damping must be in (0, 1], got {damping}")
    P, dangling = _transition_of(g)
    n = P.shape[0]
    if n == 0:
        raise ValueError("pagerank needs at least one vertex")

    if start is None:
        x = np.full(n, 1.0 / n)
    else:
        x = np.asarray(start, dtype=np.float64)
        x = x / x.sum()
    teleport = (1.0 - damping) / n
    for it in range(1, max_iter + 1):
        loose = x[dangling].sum() / n
        x_next = damping * (x @ P + loose) + teleport
        residual = float(np.abs(x_next - x).sum())
        x = x_next
        if residual < tol:
            x = x / x.sum()
            return StationaryDistribution(p=x, damping=damping, tol=tol, iterations_used=it)
    raise ConvergenceError(
        f"pagerank did not converge in {max_iter} iterations (residual {residual:.3e})",
        residual=residual,
    )


def strength_distribution(g: Graph) -> np.ndarray:
    """Visit rates of the undirected walk: strength over total strength.

    Uniform on an edgeless graph, where the walk distribution is undefined.
    """
    s = g.strengths()
    total = s.sum()
    if total == 0.0:
        return np.full(g.n, 1.0 / g.n) if g.n else s
    return s / total


def community_pagerank_order(assign: CommunityAssignment, p) -> list[int]:
    """Community ids sorted by total member visit mass, heaviest first.

    Ties go to the smaller community id, so position 0 is the top community.
    """
    mass = community_mass(assign, p)
    return sorted(range(len(mass)), key=lambda c: (-mass[c], c))


def community_mass(assign: CommunityAssignment, p) -> np.ndarray:
    vec = p.p if isinstance(p, StationaryDistribution) else np.asarray(p, dtype=np.float64)
    if len(vec) != len(assign.membership):
        raise ValueError(
            f"distribution covers {len(vec)} vertices, assignment {len(assign.membership)}"
        )
    return np.bincount(assign.membership, weights=vec, minlength=assign.num_communities)
