"""Measure how groups of users (for example likely bots) shape a retweet network.

The library builds a weighted directed retweet graph from interaction
records, splits users into groups from an external score, and compares the
groups along eight perspectives, each ending in a categorical verdict.
"""

__version__ = "0.1.0"

from .composition import global_composition, node_composition
from .graph import SocialGraph, build_graph, graph_properties, induced_subgraph, node_attributes
from .grouping import GroupSpec, assign_groups, categorize
from .influence import eigenvector_centrality, hits, influence_analysis, pagerank
from .interactions import Interaction, InteractionDataset, load_dataset, sample_dataset
from .report import assemble_report
from .robustness import robustness_analysis
from .stats import statistical_analysis
from .structure import kshell_decomposition, structure_analysis
from .temporal import temporal_analysis, window_subgraph
from .verdicts import Verdict
from .virality import extract_cascades, topic_profiles, virality_analysis

__all__ = [
    "Interaction", "InteractionDataset", "load_dataset", "sample_dataset",
    "SocialGraph", "build_graph", "graph_properties", "induced_subgraph", "node_attributes",
    "GroupSpec", "categorize", "assign_groups",
    "statistical_analysis", "global_composition", "node_composition", "robustness_analysis",
    "pagerank", "hits", "eigenvector_centrality", "influence_analysis",
    "kshell_decomposition", "structure_analysis", "temporal_analysis", "window_subgraph",
    "extract_cascades", "topic_profiles", "virality_analysis", "assemble_report", "Verdict",
]
