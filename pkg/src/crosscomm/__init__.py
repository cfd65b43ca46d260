"""Community detection across partially overlapping, partially aligned networks."""

from .alignment import AlignmentSet, SeedSet, read_alignment_tsv
from .assignment import CommunityAssignment
from .graph import EdgeRecord, Graph, VertexKind, ingest_edge_lists
from .multilayer import (FlowGraph, build, build_aggregation, build_linking,
                         build_relaxed, project_assignment)

__version__ = "0.1.0"

__all__ = [
    "AlignmentSet",
    "CommunityAssignment",
    "EdgeRecord",
    "FlowGraph",
    "Graph",
    "SeedSet",
    "VertexKind",
    "build",
    "build_aggregation",
    "build_linking",
    "build_relaxed",
    "ingest_edge_lists",
    "project_assignment",
    "read_alignment_tsv",
    "__version__",
]
