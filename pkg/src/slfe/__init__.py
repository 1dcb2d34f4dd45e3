"""Vertex-centric graph engine with start-late / finish-early redundancy reduction."""

from slfe.apps import (ConnectedComponents, PageRank, SSSP, TunkRank, WidestPath, connected_components,
                       guidance_for, make_app, pagerank, run_app, sssp, tunkrank, widest_path)
from slfe.engine import Engine, EngineConfig, RunResult, run_until_convergence
from slfe.graph import EdgeList, Graph, PartitionPlan, build_dual_csr
from slfe.ingest import EdgeListFormat, chunk_partition, generate_rmat, load_graph, parse_edge_list
from slfe.metrics import MetricsLog, Mode
from slfe.rrg import RRGuidance, generate_rrg, load_rrg, rrg_oracle, save_rrg

__version__ = "0.1.0"

__all__ = [
    "ConnectedComponents", "EdgeList", "EdgeListFormat", "Engine", "EngineConfig", "Graph",
    "MetricsLog", "Mode", "PageRank", "PartitionPlan", "RRGuidance", "RunResult", "SSSP",
    "TunkRank", "WidestPath", "build_dual_csr", "chunk_partition", "connected_components",
    "generate_rmat", "generate_rrg", "guidance_for", "load_graph", "load_rrg", "make_app",
    "pagerank", "parse_edge_list", "rrg_oracle", "run_app", "run_until_convergence",
    "save_rrg", "sssp", "tunkrank", "widest_path",
]
