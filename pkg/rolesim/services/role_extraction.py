"""Roles as communities of the similarity graph.

The similarity graph has weight ``max(S_ij, 0)`` between i != j. Its
communities come from networkx's Louvain implementation, which also yields
every aggregation level, finest first.
"""
from __future__ import annotations

from typing import Union

import networkx as nx
import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from rolesim.core.config import get_settings
from rolesim.core.exceptions import DomainError
from rolesim.core.logging import get_logger
from rolesim.models.graph import DenseSymMatrix, DirectedGraph, Partition
from rolesim.models.roles import Hierarchy
from rolesim.models.similarity import ConvergenceReport, LowRankFactor
from rolesim.services.similarity_exact import BetaLike, GraphLike, as_sparse, full_similarity
from rolesim.services.similarity_lowrank import lowrank_similarity, materialize

logger = get_logger(__name__)

SimilarityLike = Union[DenseSymMatrix, LowRankFactor, npt.ArrayLike]

LOUVAIN_THRESHOLD = 1e-7


def similarity_graph(S: SimilarityLike) -> DirectedGraph:
    """Symmetric weighted graph of the positive off-diagonal similarities."""
    if isinstance(S, LowRankFactor):
        weights = materialize(S)
    else:
        weights = np.array(S, dtype=np.float64)
        if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
            raise DomainError("similarity must be a square matrix", shape=weights.shape)
        weights = (weights + weights.T) / 2.0
    np.fill_diagonal(weights, 0.0)
    np.clip(weights, 0.0, None, out=weights)
    rows, cols = np.nonzero(weights)
    return DirectedGraph(n=weights.shape[0], src=rows, dst=cols, weight=weights[rows, cols])


def canonical_order(sim_graph: DirectedGraph) -> npt.NDArray[np.int64]:
    """Node order that depends on the weights only, not on the node ids.

    Nodes are ranked by their weight row sorted in descending order, compared
    lexicographically. Nodes with identical sorted rows keep their input order.
    """
    matrix = sim_graph.to_sparse()
    symmetric = ((matrix + matrix.T) / 2.0).toarray()
    sorted_rows = -np.sort(-symmetric, axis=1)
    return np.lexsort(sorted_rows.T[::-1]).astype(np.int64)


def to_networkx(sim_graph: DirectedGraph, order: npt.ArrayLike | None = None) -> nx.Graph:
    """Undirected networkx view; reciprocal weights are averaged and self-loops dropped.

    With ``order``, networkx node ``p`` stands for input node ``order[p]`` and
    nodes and edges are inserted in that order.
    """
    matrix = sim_graph.to_sparse()
    if order is not None:
        index = np.asarray(order, dtype=np.int64)
        matrix = matrix[index][:, index]
    upper = sp.triu((matrix + matrix.T) / 2.0, k=1, format="csr")
    upper.sort_indices()
    upper = upper.tocoo()
    graph = nx.Graph()
    graph.add_nodes_from(range(sim_graph.n))
    graph.add_weighted_edges_from(
        zip(upper.row.tolist(), upper.col.tolist(), upper.data.tolist()), weight="weight"
    )
    return graph


def cluster(sim_graph: DirectedGraph, resolution: float = 1.0, seed: int = 0) -> Hierarchy:
    """Louvain levels of ``sim_graph``; isolated nodes stay singletons.

    Louvain visits nodes in :func:`canonical_order`, so relabeling the input
    relabels the output the same way.
    """
    if resolution <= 0:
        raise DomainError("resolution must be positive", resolution=resolution)
    order = canonical_order(sim_graph)
    graph = to_networkx(sim_graph, order)
    levels = [
        Partition.from_clusters(
            sim_graph.n, ([int(order[p]) for p in community] for community in communities)
        )
        for communities in nx.community.louvain_partitions(
            graph,
            weight="weight",
            resolution=resolution,
            threshold=LOUVAIN_THRESHOLD,
            seed=seed,
        )
    ]
    if not levels:
        levels = [Partition(labels=np.arange(sim_graph.n))]
    logger.debug("Clustered similarity graph", levels=len(levels), clusters=[p.k for p in levels])
    return Hierarchy(levels=tuple(levels))


def role_similarity(
    A: GraphLike,
    r: int | None = None,
    beta: BetaLike = None,
    *,
    full: bool = False,
    force: bool = False,
) -> tuple[DenseSymMatrix | LowRankFactor, ConvergenceReport]:
    """Rank-r similarity (``settings.rank`` by default, capped at n), or full rank with ``full``."""
    adjacency = as_sparse(A)
    if full:
        return full_similarity(adjacency, beta, force=force)
    rank = min(get_settings().rank if r is None else r, adjacency.shape[0])
    return lowrank_similarity(adjacency, rank, beta, force=force)


def extract_roles(
    A: GraphLike,
    r: int | None = None,
    beta: BetaLike = None,
    resolution: float = 1.0,
    seed: int = 0,
    *,
    full: bool = False,
    force: bool = False,
) -> Hierarchy:
    """Similarity (rank-r by default, full rank with ``full``) followed by clustering."""
    similarity, report = role_similarity(A, r, beta, full=full, force=force)
    if not report.converged:
        logger.warning("Clustering a non-converged similarity", iterations=report.iterations, full=full)
    return cluster(similarity_graph(similarity), resolution=resolution, seed=seed)
