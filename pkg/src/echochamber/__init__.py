"""Echo-chamber analysis of page/user interaction data.

Subpackages cover ingestion, bipartite projection, backbone extraction,
community detection, user polarization, heavy-tail fitting, concept
sentiment analysis and synthetic data generation.
"""
from .backbone import BackboneResult, disparity_filter
from .bipartite import BipartiteGraph, WeightedGraph, build_bipartite, project
from .community import Partition, compare_partitions, detect, modularity
from .data import InteractionDataset, filter_engaged, ingest, read_dataset, summarize
from .kernels import BACKEND
from .pipeline import run_pipeline
from .synth import SynthConfig, generate

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BackboneResult",
    "BipartiteGraph",
    "InteractionDataset",
    "Partition",
    "SynthConfig",
    "WeightedGraph",
    "build_bipartite",
    "compare_partitions",
    "detect",
    "disparity_filter",
    "filter_engaged",
    "generate",
    "ingest",
    "modularity",
    "project",
    "read_dataset",
    "run_pipeline",
    "summarize",
]
